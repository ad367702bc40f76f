#pragma once
// Independent reference computations for the tests. Nothing here calls the
// code under test except for plain data accessors.

#include "shapeflow/grid.hpp"
#include "shapeflow/implicit.hpp"
#include "shapeflow/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace oracle {

using shapeflow::Mat3;
using shapeflow::Vec3;

/// Fresh, empty scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("shapeflow_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Central finite-difference gradient of a scalar function.
template <class F>
Vec3 fd_gradient(F&& f, const Vec3& p, double h = 1e-5) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    g[a] = (f(p + e) - f(p - e)) / (2.0 * h);
  }
  return g;
}

/// Central finite-difference Hessian of a scalar function.
template <class F>
Mat3 fd_hessian(F&& f, const Vec3& p, double h = 1e-4) {
  Mat3 H;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      Vec3 ea = Vec3::Zero(), eb = Vec3::Zero();
      ea[a] = h;
      eb[b] = h;
      H(a, b) = (f(p + ea + eb) - f(p + ea - eb) - f(p - ea + eb) + f(p - ea - eb)) / (4.0 * h * h);
    }
  }
  return H;
}

/// Trilinear interpolation error of a separable quadratic sum_i c_i x_i^2 at p:
/// per axis the linear interpolant overshoots by c_i t_i (1 - t_i) h_i^2.
inline double quadratic_interp_error(const shapeflow::GridSpec& spec, const Vec3& p, const Vec3& c) {
  double e = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double s = (p[a] - spec.origin[a]) / spec.spacing[a];
    const double t = s - std::floor(s);
    e += c[a] * t * (1.0 - t) * spec.spacing[a] * spec.spacing[a];
  }
  return e;
}

/// Cells whose 8 corners do not share one sign, labelled by 6-connected
/// flood fill. Returns the number of components.
inline int sign_change_shell_components(const shapeflow::ScalarGrid& g) {
  const auto& s = g.spec();
  const int nx = s.dims[0] - 1, ny = s.dims[1] - 1, nz = s.dims[2] - 1;
  auto cell = [&](int i, int j, int k) { return i + nx * (j + ny * k); };
  std::vector<char> mixed(static_cast<std::size_t>(nx) * ny * nz, 0);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        bool neg = false, pos = false;
        for (int c = 0; c < 8; ++c) {
          const double v = g.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          (v < 0.0 ? neg : pos) = true;
        }
        mixed[cell(i, j, k)] = neg && pos;
      }
  std::vector<char> seen(mixed.size(), 0);
  int components = 0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!mixed[cell(i, j, k)] || seen[cell(i, j, k)]) continue;
        ++components;
        std::queue<std::array<int, 3>> q;
        q.push({i, j, k});
        seen[cell(i, j, k)] = 1;
        while (!q.empty()) {
          const auto [a, b, c] = q.front();
          q.pop();
          const int nb[6][3] = {{a - 1, b, c}, {a + 1, b, c}, {a, b - 1, c}, {a, b + 1, c}, {a, b, c - 1}, {a, b, c + 1}};
          for (const auto& n : nb) {
            if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= nx || n[1] >= ny || n[2] >= nz) continue;
            const int id = cell(n[0], n[1], n[2]);
            if (mixed[id] && !seen[id]) {
              seen[id] = 1;
              q.push({n[0], n[1], n[2]});
            }
          }
        }
      }
  return components;
}

/// Nearest-rank percentile of |x|.
inline double percentile_abs(std::vector<double> v, double q) {
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

/// Uniformly distributed unit vector.
inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// Grid of node values f(node).
template <class F>
shapeflow::ScalarGrid tabulate(const shapeflow::GridSpec& spec, F&& f) {
  std::vector<double> v(spec.node_count());
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) v[spec.index(i, j, k)] = f(spec.node(i, j, k));
  return shapeflow::ScalarGrid(spec, std::move(v));
}

}  // namespace oracle
