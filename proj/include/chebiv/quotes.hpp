// Quote-file ingestion: comma-separated rows with the header
// spot,strike,maturity,rate,premium[,type]; type C (default) or P, puts are
// converted to synthetic calls via parity at read time.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chebiv/bs_core.hpp"

namespace chebiv {

struct QuoteRow {
  OptionQuote quote;   // put premiums already converted to call premiums
  bool was_put = false;
  int line_no = 0;
  std::string raw;     // original row text, echoed into outputs
};

struct QuoteFile {
  std::vector<QuoteRow> rows;
  std::vector<std::string> row_errors;  // "line N: message" per bad row
  std::string header;
};

/// Parse a quote stream. A malformed row is reported and skipped; a missing
/// or wrong header is a FormatError (thrown from tool_io's caller side as a
/// data error).
QuoteFile read_quote_file(std::istream& in);

/// Parity conversion C = P + S0 - K e^{-rT}.
double put_to_call_premium(const OptionQuote& put_quote);

}  // namespace chebiv
