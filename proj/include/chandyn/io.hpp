#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "chandyn/core_state.hpp"
#include "chandyn/diagnostics.hpp"
#include "chandyn/mechanics.hpp"
#include "chandyn/solver.hpp"

namespace chandyn::io {

/// All tables carry a header row and full round-trip precision so identical
/// configurations reproduce byte-identical files.
struct TableOptions {
  char delimiter{' '};
  int precision{std::numeric_limits<double>::max_digits10};
};

inline std::string format_value(double v, const TableOptions& opt) {
  std::ostringstream os;
  os << std::setprecision(opt.precision) << v;
  return os.str();
}

template <typename Range>
void write_row(std::ostream& os, const Range& values, const TableOptions& opt) {
  bool first = true;
  for (const double v : values) {
    if (!first) os << opt.delimiter;
    os << format_value(v, opt);
    first = false;
  }
  os << '\n';
}

inline void write_header(std::ostream& os,
                         const std::vector<std::string>& names,
                         const TableOptions& opt) {
  bool first = true;
  for (const auto& n : names) {
    if (!first) os << opt.delimiter;
    os << n;
    first = false;
  }
  os << '\n';
}

/// Snapshot blocks at cell centers: x, rho, kappa, theta_plus, theta_minus.
/// rho and kappa are averaged to the centers (exact for the piecewise-linear
/// reconstruction); one block per output time, blank-line separated.
inline void write_snapshots(std::ostream& os,
                            const std::vector<DensityPair<double>>& snaps,
                            const TableOptions& opt = {}) {
  write_header(os, {"x", "rho", "kappa", "theta_plus", "theta_minus"}, opt);
  for (const auto& d : snaps) {
    const ChannelState<double> s = reconstruct_profiles(d);
    const Index n = d.grid.n_cells;
    const ArrayXd xc = d.grid.cell_centers();
    os << "# time = " << format_value(d.time, opt) << '\n';
    for (Index i = 0; i < n; ++i) {
      write_row(os,
                std::initializer_list<double>{
                    xc(i), 0.5 * (s.rho(i) + s.rho(i + 1)),
                    0.5 * (s.kappa(i) + s.kappa(i + 1)), d.theta_plus(i),
                    d.theta_minus(i)},
                opt);
    }
    os << '\n';
  }
}

inline void write_entropy_records(
    std::ostream& os, const std::vector<EntropyRecord<double>>& records,
    const TableOptions& opt = {}) {
  write_header(os,
               {"time", "S", "bound", "mass_plus", "mass_minus",
                "positivity_margin", "kxlogkx", "kxlogkx_bound"},
               opt);
  for (const auto& r : records) {
    write_row(os,
              std::initializer_list<double>{r.time, r.S, r.bound, r.mass_plus,
                                            r.mass_minus, r.positivity_margin,
                                            r.kxlogkx, r.kxlogkx_bound},
              opt);
  }
}

/// Converged profiles next to a reference with per-node absolute errors.
inline void write_profile_comparison(std::ostream& os,
                                     const ChannelState<double>& num,
                                     const ChannelState<double>& ref,
                                     const TableOptions& opt = {}) {
  write_header(
      os, {"x", "rho", "kappa", "rho_ref", "kappa_ref", "err_rho", "err_kappa"},
      opt);
  for (Index i = 0; i <= num.grid.n_cells; ++i) {
    write_row(os,
              std::initializer_list<double>{
                  num.grid.nodes(i), num.rho(i), num.kappa(i), ref.rho(i),
                  ref.kappa(i), std::abs(num.rho(i) - ref.rho(i)),
                  std::abs(num.kappa(i) - ref.kappa(i))},
              opt);
  }
}

/// Lattice polylines: one per row then one per column, blank-line separated,
/// columns x1_displaced x2_displaced (u1 == 0 so x1 is the reference value).
inline void write_polylines(std::ostream& os, const DeformedMesh<double>& m,
                            const TableOptions& opt = {}) {
  write_header(os, {"x1", "x2"}, opt);
  for (Index j = 0; j < m.x2.size(); ++j) {
    for (Index i = 0; i < m.x1.size(); ++i) {
      write_row(os,
                std::initializer_list<double>{m.x1(i), m.x2(j) + m.u2(i)},
                opt);
    }
    os << '\n';
  }
  for (Index i = 0; i < m.x1.size(); ++i) {
    for (Index j = 0; j < m.x2.size(); ++j) {
      write_row(os,
                std::initializer_list<double>{m.x1(i), m.x2(j) + m.u2(i)},
                opt);
    }
    os << '\n';
  }
}

inline void write_u2_profile(std::ostream& os, const ArrayXd& x1,
                             const ArrayXd& u2, const TableOptions& opt = {}) {
  write_header(os, {"x1", "u2"}, opt);
  for (Index i = 0; i < x1.size(); ++i) {
    write_row(os, std::initializer_list<double>{x1(i), u2(i)}, opt);
  }
}

/// Two-column (x, value) table; '#' comment lines and blank lines skipped.
inline std::pair<ArrayXd, ArrayXd> read_two_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profile file: " + path);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x >> v)) {
      throw std::invalid_argument("malformed profile line in " + path + ": " +
                                  line);
    }
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 7) {
    throw std::invalid_argument("profile file needs >= 7 samples: " + path);
  }
  ArrayXd ax(xs.size()), av(vs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ax(static_cast<Index>(i)) = xs[i];
    av(static_cast<Index>(i)) = vs[i];
  }
  return {ax, av};
}

}  // namespace chandyn::io
