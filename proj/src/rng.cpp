#include "glmamp/rng.hpp"

#include "glmamp/common.hpp"

namespace glmamp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::DegenerateRatio: return "degenerate-ratio";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::EdgeSolver: return "edge-solver-failure";
    case ErrorKind::EquivalenceViolation: return "equivalence-violation";
    case ErrorKind::SignConvention: return "sign-convention";
    case ErrorKind::InitSolver: return "init-solver";
    case ErrorKind::PreprocessDomain: return "preprocessing-domain";
    case ErrorKind::SingularExpectation: return "singular-expectation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t p : path) {
    state = out ^ (p * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL);
    out = splitmix64(state);
  }
  return out;
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(seed, path));
}

}  // namespace glmamp
