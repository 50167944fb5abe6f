#ifndef EXCMEAS_COMMON_HPP
#define EXCMEAS_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace excmeas {

using Cpx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209;
// Constant term in the potential-kernel expansion a(x) ~ (2/pi) log|x| + k0.
inline const double kPotentialK0 =
    (2.0 * kEulerGamma + 3.0 * std::log(2.0)) / kPi;

struct PointI {
  int x = 0;
  int y = 0;
  friend bool operator==(PointI a, PointI b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(PointI a, PointI b) { return !(a == b); }
  friend bool operator<(PointI a, PointI b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

inline std::uint64_t point_key(PointI p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y));
}

struct PointIHash {
  std::size_t operator()(PointI p) const noexcept {
    std::uint64_t k = point_key(p);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

inline const PointI kNeighbors4[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

inline PointI operator+(PointI a, PointI b) { return {a.x + b.x, a.y + b.y}; }
inline PointI operator-(PointI a, PointI b) { return {a.x - b.x, a.y - b.y}; }

// Exact positive rational, used for lattice spacings.
struct Rational {
  long long num = 1;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational times(Rational o) const { return Rational(num * o.num, den * o.den); }
  friend bool operator==(Rational a, Rational b) {
    return a.num == b.num && a.den == b.den;
  }
};

// ---------------------------------------------------------------------------
// Counter-based splittable RNG. Every draw is a pure function of
// (seed, stream, counter), so parallel shards and re-generation by index are
// deterministic regardless of thread scheduling.
// ---------------------------------------------------------------------------

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix_key(seed, stream)) {}

  // Derive an independent stream (e.g. one per Monte Carlo sample index).
  CounterRng fork(std::uint64_t sub) const {
    CounterRng r(0, 0);
    r.key_ = detail::splitmix64(key_ ^ (0xd1342543de82ef95ULL * (sub + 1)));
    return r;
  }

  std::uint64_t next_u64() {
    return detail::splitmix64(key_ ^ detail::splitmix64(counter_++));
  }

  // Uniform on (0,1): never returns an exact endpoint.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // One uniform in, one normal out (inverse CDF), keeping the counter
  // consumption deterministic.
  double normal() { return inverse_normal_cdf(uniform()); }

  Cpx normal2() {
    double a = normal();
    double b = normal();
    return {a, b};
  }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  static double inverse_normal_cdf(double p);

 private:
  static std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(detail::splitmix64(seed) ^
                              (0x9e3779b97f4a7c15ULL * (stream + 1)));
  }
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Special functions and quadrature helpers.
// ---------------------------------------------------------------------------

// Upper regularized incomplete gamma Q(a, x); chi-square tail probabilities.
double regularized_gamma_q(double a, double x);

// P(chi2 with dof k exceeds x).
inline double chi_square_tail(double x, double dof) {
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

inline double circle_distance(double a, double b) {
  double d = std::fmod(std::fabs(a - b), kTwoPi);
  return d > kPi ? kTwoPi - d : d;
}

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

}  // namespace excmeas

#endif
