// Online phase: normalization, in-the-money reduction, area classification,
// price transformation and low-rank evaluation, for single quotes and
// batches, plus the closed-form dv/dc.
#pragma once

#include <span>
#include <vector>

#include "chebiv/bs_core.hpp"
#include "chebiv/surface.hpp"

namespace chebiv {

enum class InvertStatus {
  Ok,
  OutOfDomainLow,
  OutOfDomainHigh,
  ArbitrageViolation,
};

const char* invert_status_name(InvertStatus s);

struct InversionResult {
  InvertStatus status = InvertStatus::Ok;
  AreaId area = AreaId::II;
  double v = 0.0;  // meaningful only when status == Ok
};

/// Invert one normalized pair (x, c). x > 0 is reduced through the
/// in-the-money identity first. Out-of-domain and arbitrage conditions come
/// back as statuses; the function never clamps c into the domain and never
/// throws on data.
InversionResult invert(const SurfaceModel& m, double x, double c);

/// Elementwise invert; order preserved, one bad quote never aborts the rest.
std::vector<InversionResult> invert_batch(
    const SurfaceModel& m, std::span<const NormalizedQuote> quotes);

/// dv/dc through the chain rule on the low-rank form. Throws
/// std::domain_error for out-of-domain points and for points within 1e-12
/// of an internal seam (the c1/c2 curves and x_split), where the one-sided
/// derivative would be ambiguous or singular.
double dvdc(const SurfaceModel& m, double x, double c);

struct QuoteInversionResult {
  InvertStatus status = InvertStatus::Ok;
  AreaId area = AreaId::II;
  double x = 0.0;      // reduced moneyness actually inverted
  double c = 0.0;      // reduced normalized price
  double v = 0.0;      // time-scaled volatility, when Ok
  double sigma = 0.0;  // v / sqrt(T), when Ok
};

/// Full pipeline from a raw quote: normalize, reduce, invert, rescale.
QuoteInversionResult invert_quote(const SurfaceModel& m, const OptionQuote& q);

/// Evaluate one specific area's interpolant at (x, c) without classifying.
/// Used by seam diagnostics; (x, c) must lie in that area's closed rectangle
/// (up to the usual transform slack).
double eval_area(const SurfaceModel& m, AreaId area, double x, double c);

}  // namespace chebiv
