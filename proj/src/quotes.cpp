#include "chebiv/quotes.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "chebiv/model_io.hpp"

namespace chebiv {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream iss(line);
  while (std::getline(iss, field, ',')) {
    // trim ascii whitespace
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_num(const std::string& tok, double* out) {
  char* end = nullptr;
  *out = std::strtod(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0' && std::isfinite(*out);
}

}  // namespace

double put_to_call_premium(const OptionQuote& put_quote) {
  return put_quote.premium + put_quote.spot -
         put_quote.strike * std::exp(-put_quote.rate * put_quote.maturity);
}

QuoteFile read_quote_file(std::istream& in) {
  QuoteFile out;
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("quote file: empty, header row required");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  out.header = line;
  {
    auto h = split_csv(line);
    const std::vector<std::string> want = {"spot", "strike", "maturity",
                                           "rate", "premium"};
    bool ok = h.size() == 5 || (h.size() == 6 && h[5] == "type");
    for (std::size_t i = 0; ok && i < want.size(); ++i) ok = h[i] == want[i];
    if (!ok) {
      throw FormatError(
          "quote file: header must be spot,strike,maturity,rate,premium[,type]");
    }
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    auto bad = [&](const std::string& why) {
      out.row_errors.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() != 5 && f.size() != 6) {
      bad("expected 5 or 6 fields, got " + std::to_string(f.size()));
      continue;
    }
    QuoteRow row;
    row.line_no = line_no;
    row.raw = line;
    double* slots[5] = {&row.quote.spot, &row.quote.strike,
                        &row.quote.maturity, &row.quote.rate,
                        &row.quote.premium};
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
      if (!parse_num(f[i], slots[i])) {
        bad("field " + std::to_string(i + 1) + " is not a number: '" + f[i] +
            "'");
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (f.size() == 6 && !f[5].empty()) {
      if (f[5] == "P" || f[5] == "p") {
        row.was_put = true;
      } else if (f[5] != "C" && f[5] != "c") {
        bad("type must be C or P, got '" + f[5] + "'");
        continue;
      }
    }
    if (!(row.quote.spot > 0.0) || !(row.quote.strike > 0.0) ||
        !(row.quote.maturity > 0.0)) {
      bad("spot, strike and maturity must be positive");
      continue;
    }
    if (!(row.quote.premium >= 0.0)) {
      bad("premium must be >= 0");
      continue;
    }
    if (row.was_put) row.quote.premium = put_to_call_premium(row.quote);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace chebiv
