// Brute-force xi reference: plain partial sums of the sine series in long double,
// with the mode kernel evaluated from its own closed forms (no library code).
//
//   gen_xi_reference [N] > xi_reference.csv
//   gen_xi_reference --check FILE N TOL   (recompute at N, compare against FILE)

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

long double kernel(long n, long double c, long double tau) {
  const long double nn = static_cast<long double>(n);
  const long double n2 = nn * nn;
  const long double disc = 1.0L - 4.0L * c * c / n2;
  if (disc < 0.0L) {
    const long double w = 0.5L * n2 * std::sqrt(-disc);
    return std::exp(-0.5L * n2 * tau) * std::sin(w * tau) / w;
  }
  if (disc == 0.0L) return tau * std::exp(-0.5L * n2 * tau);
  const long double lam = -0.5L * n2 * (1.0L + std::sqrt(disc));
  const long double mu = c * c * n2 / lam;  // lambda * mu = c^2 n^2
  return (std::exp(mu * tau) - std::exp(lam * tau)) / (mu - lam);
}

long double xi(long N, long double alpha, long double c, long double T, long double t,
               long double x) {
  const long double tau = T - t;
  long double sum = 0.0L, comp = 0.0L;
  for (long n = 1; n <= N; ++n) {
    const long double term = std::sin(n * alpha) * kernel(n, c, tau) * std::sin(n * x);
    const long double y = term - comp;
    const long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return 2.0L / kPi * sum;
}

std::vector<double> read_fixture(const char* path) {
  std::ifstream in(path);
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 3 && std::getline(ss, cell, ','); ++k)
      if (k == 2) v.push_back(std::stod(cell));
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const bool check = argc > 1 && std::strcmp(argv[1], "--check") == 0;
  if (check && argc != 5) {
    std::fprintf(stderr, "usage: gen_xi_reference --check FILE N TOL\n");
    return 2;
  }
  const long N = check ? std::atol(argv[3]) : argc > 1 ? std::atol(argv[1]) : 10000000L;
  const long double alpha = 0.3L, c = 1.3L, T = 2.0L;
  const double ts[] = {0.2, 0.6, 1.0, 1.4, 1.8};
  const double xs[] = {1.6, 1.8, 2.0, 2.2, 2.4};
  std::vector<long double> vals(25);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < 25; ++k)
    vals[static_cast<std::size_t>(k)] = xi(N, alpha, c, T, ts[k / 5], xs[k % 5]);
  if (check) {
    const std::vector<double> ref = read_fixture(argv[2]);
    const double tol = std::atof(argv[4]);
    if (ref.size() != 25) {
      std::fprintf(stderr, "fixture %s has %zu values, expected 25\n", argv[2], ref.size());
      return 1;
    }
    double worst = 0.0;
    for (int k = 0; k < 25; ++k)
      worst = std::fmax(worst, std::fabs(ref[static_cast<std::size_t>(k)] -
                                         static_cast<double>(vals[static_cast<std::size_t>(k)])));
    std::printf("max |fixture - N=%ld sum| = %.3e (tol %.1e)\n", N, worst, tol);
    return worst <= tol ? 0 : 1;
  }
  std::printf("# alpha=0.3 c=1.3 T=2 N=%ld, long double partial sums\n", N);
  std::printf("t,x,xi\n");
  for (int k = 0; k < 25; ++k)
    std::printf("%.17g,%.17g,%.17Lg\n", ts[k / 5], xs[k % 5], vals[static_cast<std::size_t>(k)]);
  return 0;
}
