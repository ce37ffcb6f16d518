#include "qggm/rng.hpp"

#include <cmath>

#include "qggm/errors.hpp"

namespace qggm {

namespace {
std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x51u, 0x67u};
  return std::mt19937_64(seq);
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw ValidationError(std::string(what) + " must be positive and finite");
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

double RngStream::uniform() {
  // 53 random bits mapped to the midpoint grid of (0, 1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double sample_normal(RngStream& stream, double mean, double var) {
  require_positive(var, "sample_normal: variance");
  using param = std::normal_distribution<double>::param_type;
  return stream.normal_(stream.engine_, param(mean, std::sqrt(var)));
}

double sample_exponential(RngStream& stream, double rate) {
  require_positive(rate, "sample_exponential: rate");
  return -std::log(stream.uniform()) / rate;
}

double sample_gamma(RngStream& stream, double shape, double rate) {
  require_positive(shape, "sample_gamma: shape");
  require_positive(rate, "sample_gamma: rate");
  // libstdc++ implements Marsaglia-Tsang with the shape+1 boost for shape < 1.
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(stream.engine());
}

}  // namespace qggm
