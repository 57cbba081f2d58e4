#include "qconv/states.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qconv/errors.hpp"
#include "qconv/state_io.hpp"

namespace qconv {

namespace {

constexpr double kNormTolerance = 1e-12;

// Multiplies v by a phase so its first non-negligible component is real-positive.
QubitVector fix_phase(QubitVector v) {
  for (const Complex& x : v) {
    const double r = std::abs(x);
    if (r > 1e-14) {
      const Complex ph = std::conj(x) / r;
      for (Complex& y : v) y *= ph;
      return v;
    }
  }
  return v;
}

QubitVector orthogonal_complement(const QubitVector& v) {
  return {-std::conj(v[1]), std::conj(v[0])};
}

QubitVector normalized(QubitVector v) {
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  v[0] /= n;
  v[1] /= n;
  return v;
}

Complex inner(const QubitVector& a, const QubitVector& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

std::normal_distribution<double> standard_normal() { return std::normal_distribution<double>(0.0, 1.0); }

Complex gaussian_complex(std::mt19937_64& gen) {
  auto nd = standard_normal();
  const double re = nd(gen);
  const double im = nd(gen);
  return {re, im};
}

Amplitudes haar_vector(std::mt19937_64& gen) {
  Amplitudes v;
  double n2 = 0.0;
  for (Complex& x : v) {
    x = gaussian_complex(gen);
    n2 += std::norm(x);
  }
  const double n = std::sqrt(n2);
  for (Complex& x : v) x /= n;
  return v;
}

QubitVector haar_qubit(std::mt19937_64& gen) {
  QubitVector v{gaussian_complex(gen), gaussian_complex(gen)};
  return normalized(v);
}

// Haar-random 2x2 unitary with columns (u, u_perp).
ComplexMatrix haar_unitary2(std::mt19937_64& gen) {
  const QubitVector u = haar_qubit(gen);
  const QubitVector w = orthogonal_complement(u);
  ComplexMatrix m(2);
  m(0, 0) = u[0];
  m(1, 0) = u[1];
  m(0, 1) = w[0];
  m(1, 1) = w[1];
  return m;
}

DensityMatrix random_mixed(std::mt19937_64& gen, int rank) {
  const std::size_t k = static_cast<std::size_t>(rank);
  std::vector<Complex> psi(4 * k);
  double n2 = 0.0;
  for (Complex& x : psi) {
    x = gaussian_complex(gen);
    n2 += std::norm(x);
  }
  ComplexMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      Complex s = 0.0;
      for (std::size_t a = 0; a < k; ++a) s += psi[i * k + a] * std::conj(psi[j * k + a]);
      m(i, j) = s / n2;
    }
  return DensityMatrix::trusted(m);
}

double parse_number(std::string_view text, std::string_view token) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw DomainError("cannot parse number in state descriptor '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

PureState PureState::from_amplitudes(const Amplitudes& v) {
  double n2 = 0.0;
  for (const Complex& x : v) n2 += std::norm(x);
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    throw DomainError("pure state is not normalized (norm^2 = " + std::to_string(n2) + ")");
  }
  return schmidt_decompose(v);
}

double PureState::schmidt_angle() const {
  return std::min(asin_sqrt(schmidt_.lambda2), std::numbers::pi / 4);
}

ComplexMatrix PureState::projector() const { return ComplexMatrix::outer(amplitudes_); }

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  require_density_matrix(m);
  return DensityMatrix(m.hermitian_part());
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::trusted(const ComplexMatrix& m) {
  if (m.dim() != 4) throw DomainError("density matrix must be 4x4");
  return DensityMatrix(m.hermitian_part());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(ComplexMatrix::identity(4) * 0.25); }

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double t) {
  return DensityMatrix::trusted(a.matrix() * (1.0 - t) + b.matrix() * t);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const double root = detail::root_fidelity(psd_sqrt(rho.matrix()), psd_sqrt(sigma.matrix()));
  return root * root;
}

double bures_angle(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return acos_sqrt(fidelity(rho, sigma));
}

PureState pure_from_angle(double alpha) {
  const double a = clamp_to_domain(alpha, 0.0, std::numbers::pi / 4, "pure_from_angle");
  return PureState::from_amplitudes({std::cos(a), 0.0, 0.0, std::sin(a)});
}

PureState bell_phi_plus() { return pure_from_angle(std::numbers::pi / 4); }

DensityMatrix werner(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("werner: r must lie in [0, 1]");
  ComplexMatrix m(4);
  const double noise = (1.0 - r) / 4.0;
  m(0, 0) = m(3, 3) = r / 2.0 + noise;
  m(1, 1) = m(2, 2) = noise;
  m(0, 3) = m(3, 0) = r / 2.0;
  return DensityMatrix::trusted(m);
}

PureState schmidt_decompose(const Amplitudes& input) {
  double n2 = 0.0;
  for (const Complex& x : input) n2 += std::norm(x);
  if (!(n2 > 1e-300)) throw DomainError("schmidt_decompose: zero vector");
  Amplitudes v = input;
  const double n = std::sqrt(n2);
  for (Complex& x : v) x /= n;

  // Amplitude matrix M[a][b] = v[2a + b]; lambda1 lambda2 = |det M|^2 and
  // lambda1 - lambda2 comes from M M^H directly, so neither end of the range
  // goes through sqrt(1 - 4|det|^2).
  ComplexMatrix mmh(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      mmh(i, j) = v[2 * i] * std::conj(v[2 * j]) + v[2 * i + 1] * std::conj(v[2 * j + 1]);
  const Complex det = v[0] * v[3] - v[1] * v[2];
  const double c2 = std::min(4.0 * std::norm(det), 1.0);
  const double split = mmh(0, 0).real() - mmh(1, 1).real();
  const double diff = std::min(std::sqrt(split * split + 4.0 * std::norm(mmh(0, 1))), 1.0);
  SchmidtData s;
  s.lambda2 = std::min(c2 / (2.0 * (1.0 + diff)), 0.5);
  s.lambda1 = 1.0 - s.lambda2;

  const EigenSystem es = hermitian_eig(mmh);
  s.basis_a[0] = fix_phase({es.vectors(0, 1), es.vectors(1, 1)});
  s.basis_a[1] = fix_phase(orthogonal_complement(s.basis_a[0]));

  // b_k = (<a_k| (x) 1) v / sqrt(lambda_k)
  auto project = [&](const QubitVector& a) {
    return QubitVector{std::conj(a[0]) * v[0] + std::conj(a[1]) * v[2],
                       std::conj(a[0]) * v[1] + std::conj(a[1]) * v[3]};
  };
  QubitVector b0 = normalized(project(s.basis_a[0]));
  QubitVector b1;
  if (s.lambda2 > 1e-20) {
    b1 = project(s.basis_a[1]);
    const Complex ov = inner(b0, b1);
    b1[0] -= ov * b0[0];
    b1[1] -= ov * b0[1];
    b1 = normalized(b1);
  } else {
    b1 = orthogonal_complement(b0);
  }
  // Drop the global phase so that b0 is phase-fixed too.
  for (const Complex& x : b0) {
    const double r = std::abs(x);
    if (r > 1e-14) {
      const Complex ph = std::conj(x) / r;
      b0[0] *= ph;
      b0[1] *= ph;
      b1[0] *= ph;
      b1[1] *= ph;
      break;
    }
  }
  if (s.lambda2 <= 1e-20) b1 = fix_phase(b1);
  s.basis_b = {b0, b1};
  return PureState(v, s);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(seed ^ splitmix(index + 0x632be59bd9b4e019ULL));
}

PureState sample_haar_pure(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return PureState::from_amplitudes(haar_vector(gen));
}

DensityMatrix sample_mixed(std::uint64_t seed, int rank) {
  if (rank < 1 || rank > 4) throw DomainError("sample_mixed: rank must be in 1..4");
  std::mt19937_64 gen(seed);
  return random_mixed(gen, rank);
}

std::vector<DensityMatrix> sample_fidelity_ball(const DensityMatrix& rho, double f, std::size_t n,
                                                std::uint64_t seed) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("sample_fidelity_ball: f must lie in (0, 1]");
  std::vector<DensityMatrix> out;
  out.reserve(n);
  if (f == 1.0) {
    out.assign(n, rho);
    return out;
  }

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ComplexMatrix sqrt_rho = psd_sqrt(rho.matrix());
  const ComplexMatrix rho2 = (rho.matrix() * rho.matrix()).hermitian_part();
  const double root_f = std::sqrt(f);
  // sqrt F(rho, (1-t) rho + t D) = tr sqrt((1-t) rho^2 + t sqrt(rho) D sqrt(rho)).
  // Eigenvalues at the noise floor are dropped, which can only lower the
  // estimate, so acceptance stays conservative.
  auto root_fid = [&](const ComplexMatrix& b, double t) {
    const auto ev = hermitian_eigvals(rho2 * (1.0 - t) + b * t);
    const double floor = kSqrtNoiseFloor * std::max(ev.back(), 0.0);
    double s = 0.0;
    for (double x : ev)
      if (x > floor) s += std::sqrt(x);
    return s;
  };

  const ComplexMatrix phi_plus = bell_phi_plus().projector();
  while (out.size() < n) {
    ComplexMatrix direction;
    switch (gen() % 5) {
      case 0:
        direction = ComplexMatrix::outer(haar_vector(gen));
        break;
      case 1:
        direction = random_mixed(gen, 1 + static_cast<int>(gen() % 4)).matrix();
        break;
      case 2: {
        const QubitVector a = haar_qubit(gen);
        const QubitVector b = haar_qubit(gen);
        const Amplitudes ab{a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
        direction = ComplexMatrix::outer(ab);
        break;
      }
      case 3: {
        const ComplexMatrix u = kron(haar_unitary2(gen), haar_unitary2(gen));
        direction = u * rho.matrix() * u.adjoint();
        break;
      }
      default: {
        const ComplexMatrix u = kron(haar_unitary2(gen), haar_unitary2(gen));
        direction = u * phi_plus * u.adjoint();
        break;
      }
    }
    const ComplexMatrix b = (sqrt_rho * direction * sqrt_rho).hermitian_part();

    // sqrt(F) is concave along the segment and equals 1 at t = 0, so chord
    // roots stay inside the ball and so does every t below an accepted one.
    double t = 1.0;
    double value = root_fid(b, 1.0);
    if (value < root_f) {
      double lo_t = 0.0;
      double lo_v = 1.0;
      const int refinements = static_cast<int>(gen() % 4);
      for (int k = 0;; ++k) {
        const double slope = (lo_v - value) / (t - lo_t);
        const double next = lo_t + (lo_v - root_f) / slope;
        lo_t = std::clamp(next, lo_t, t);
        lo_v = root_fid(b, lo_t);
        if (k >= refinements || lo_v < root_f) break;
      }
      t = lo_t;
      value = lo_v;
    }
    if (value < root_f) continue;
    if (unit(gen) < 0.5) t *= unit(gen);
    out.push_back(DensityMatrix::trusted(rho.matrix() * (1.0 - t) + direction * t));
  }
  return out;
}

DensityMatrix as_density(const AnyState& s) {
  if (const auto* p = std::get_if<PureState>(&s)) return DensityMatrix::from_pure(*p);
  return std::get<DensityMatrix>(s);
}

AnyState parse_state_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw DomainError("state descriptor '" + std::string(spec) + "' must look like kind:value");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = spec.substr(colon + 1);
  if (kind == "pure") return pure_from_angle(parse_number(arg, spec));
  if (kind == "werner") return werner(parse_number(arg, spec));
  if (kind == "bell") {
    if (arg == "phi+") return bell_phi_plus();
    throw DomainError("unknown Bell state in '" + std::string(spec) + "' (supported: phi+)");
  }
  if (kind == "haar") {
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), seed);
    if (ec != std::errc{} || ptr != arg.data() + arg.size() || arg.empty()) {
      throw DomainError("cannot parse seed in state descriptor '" + std::string(spec) + "'");
    }
    return sample_haar_pure(seed);
  }
  if (kind == "file") return load_state_file(std::filesystem::path(std::string(arg)));
  throw DomainError("unknown state kind '" + std::string(kind) + "' in '" + std::string(spec) + "'");
}

}  // namespace qconv
