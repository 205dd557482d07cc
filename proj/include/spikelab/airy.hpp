#pragma once

namespace spikelab {

struct AiryPair {
  double ai;
  double aip;
};

/// Airy function Ai and its derivative. Full accuracy (>= 10 significant
/// digits) on [-40, 40]; evaluation degrades gracefully somewhat beyond and
/// throws DomainError far outside.
AiryPair airy(double x);

}  // namespace spikelab
