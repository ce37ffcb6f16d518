#pragma once

#include <cstdint>
#include <random>

namespace qggm {

/// A reproducible random stream identified by (seed, stream id). Equal pairs
/// replay identical sequences; distinct stream ids are seeded independently.
/// Streams are move-only values and are never shared between threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  RngStream(const RngStream&) = delete;
  RngStream& operator=(const RngStream&) = delete;
  RngStream(RngStream&&) = default;
  RngStream& operator=(RngStream&&) = default;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  std::mt19937_64& engine() { return engine_; }

 private:
  friend double sample_normal(RngStream&, double, double);

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// One draw from N(mean, var). Throws ValidationError unless var > 0.
double sample_normal(RngStream& stream, double mean, double var);

/// Exponential with density rate·exp(−rate·x).
double sample_exponential(RngStream& stream, double rate);

/// Gamma with density ∝ x^{shape−1}·exp(−rate·x). Rate, not scale.
double sample_gamma(RngStream& stream, double shape, double rate);

}  // namespace qggm
