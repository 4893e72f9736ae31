#include "su2floquet/crossings.hpp"

#include "su2floquet/assignment.hpp"
#include "su2floquet/linear_fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

namespace su2floquet {

const char* to_string(CrossingKind k) {
  switch (k) {
    case CrossingKind::DifferentParity: return "different-parity";
    case CrossingKind::SameParity: return "same-parity";
    case CrossingKind::Avoided: return "avoided";
    case CrossingKind::Collapse: return "collapse";
  }
  return "?";
}

const char* to_string(SectorPair s) {
  switch (s) {
    case SectorPair::EvenOdd: return "even-odd";
    case SectorPair::EvenEven: return "even-even";
    case SectorPair::OddOdd: return "odd-odd";
    case SectorPair::Unresolved: return "unresolved";
  }
  return "?";
}

CrossingKind crossing_kind_from_string(const std::string& s) {
  for (auto k : {CrossingKind::DifferentParity, CrossingKind::SameParity, CrossingKind::Avoided,
                 CrossingKind::Collapse}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown crossing kind '" + s + "'");
}

SectorPair sector_pair_from_string(const std::string& s) {
  for (auto p : {SectorPair::EvenOdd, SectorPair::EvenEven, SectorPair::OddOdd, SectorPair::Unresolved}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown sector pair '" + s + "'");
}

CrossingKind classify_crossing(const CrossingRecord& r, double tau) {
  if (r.kind == CrossingKind::Collapse) return CrossingKind::Collapse;
  if (!(r.gap_bound <= tau)) return CrossingKind::Avoided;
  return r.sector_pair == SectorPair::EvenOdd ? CrossingKind::DifferentParity : CrossingKind::SameParity;
}

std::vector<int> match_vectors(const CMatrix& a, const CMatrix& b, double* min_overlap) {
  const RMatrix w = (a.adjoint() * b).cwiseAbs2();
  std::vector<int> col = max_weight_assignment(w);
  if (min_overlap) {
    double m = 1.0;
    for (std::size_t i = 0; i < col.size(); ++i) m = std::min(m, w(static_cast<int>(i), col[i]));
    *min_overlap = m;
  }
  return col;
}

namespace {

struct SectorEig {
  std::vector<double> phases;
  CMatrix vectors;
};

struct Column {
  double h = 0.0;
  std::vector<SectorEig> s;
};

struct PairType {
  int s1;
  int s2;
  SectorPair label;
};

using Perms = std::vector<std::vector<int>>;

struct BudgetHit {
  std::string what;
};

bool negative(double d) { return d < 0.0; }

double circular_mean(double a, double b) { return wrap_phase(a + 0.5 * wrap_difference(b - a)); }

class Scanner {
 public:
  Scanner(const ModelParams& templ, const CrossingScanConfig& cfg, std::atomic<std::size_t>& evaluations)
      : templ_(templ), cfg_(cfg), solver_(templ.basis), evaluations_(evaluations) {
    xx_ = templ.variant == Variant::XX;
    if (!xx_) {
      pairs_.push_back({0, 0, SectorPair::Unresolved});
    } else {
      switch (cfg.selection) {
        case SectorSelection::All:
          pairs_ = {{0, 0, SectorPair::EvenEven}, {1, 1, SectorPair::OddOdd}, {0, 1, SectorPair::EvenOdd}};
          break;
        case SectorSelection::Even: pairs_ = {{0, 0, SectorPair::EvenEven}}; break;
        case SectorSelection::Odd: pairs_ = {{1, 1, SectorPair::OddOdd}}; break;
        case SectorSelection::DifferentParity: pairs_ = {{0, 1, SectorPair::EvenOdd}}; break;
      }
    }
  }

  bool collapse = false;

  Column column(double h) const {
    if (evaluations_.fetch_add(1) >= cfg_.evaluation_budget) throw BudgetHit{"evaluation budget exhausted"};
    Column c;
    c.h = h;
    const UnitaryOperator u = solver_.builder().floquet(templ_.with_heta(h));
    if (xx_) {
      const ParityBlocks pb = parity_blocks(u, solver_.parity());
      for (const auto* block : {&pb.even, &pb.odd}) {
        EigenphaseSet e = eigenphases(*block, true);
        c.s.push_back({std::move(e.phases), std::move(*e.vectors)});
      }
    } else {
      EigenphaseSet e = eigenphases(u, true);
      c.s.push_back({std::move(e.phases), std::move(*e.vectors)});
    }
    return c;
  }

  // Follows the levels from L to R, halving the step while any matched
  // overlap is below the threshold. With detect set, every sign change of a
  // pair's wrapped difference inside the step is refined into a record.
  Perms step(const Column& l, const Column& r, int depth, bool detect, std::vector<CrossingRecord>& out) const {
    Perms perm(l.s.size());
    double worst = 1.0;
    for (std::size_t s = 0; s < l.s.size(); ++s) {
      double o = 1.0;
      perm[s] = match_vectors(l.s[s].vectors, r.s[s].vectors, &o);
      worst = std::min(worst, o);
    }
    if (worst < cfg_.min_overlap) {
      if (depth >= cfg_.max_refine_depth) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "level tracking unresolved near heta = " << l.h << " after " << depth << " halvings";
        throw BudgetHit{msg.str()};
      }
      const Column m = column(0.5 * (l.h + r.h));
      const Perms p1 = step(l, m, depth + 1, detect, out);
      const Perms p2 = step(m, r, depth + 1, detect, out);
      for (std::size_t s = 0; s < perm.size(); ++s)
        for (std::size_t i = 0; i < perm[s].size(); ++i) perm[s][i] = p2[s][p1[s][i]];
      return perm;
    }
    if (!detect || in_collapse_step(l.h, r.h)) return perm;
    for (const PairType& pt : pairs_) {
      const int n1 = static_cast<int>(l.s[pt.s1].phases.size());
      const int n2 = static_cast<int>(l.s[pt.s2].phases.size());
      for (int a = 0; a < n1; ++a) {
        for (int b = (pt.s1 == pt.s2 ? a + 1 : 0); b < n2; ++b) {
          const int ar = perm[pt.s1][a];
          const int br = perm[pt.s2][b];
          const double dl = diff(l, pt, a, b);
          const double dr = diff(r, pt, ar, br);
          if (negative(dl) != negative(dr) && std::abs(dl) + std::abs(dr) < kPi)
            out.push_back(bisect(l, r, pt, a, b, ar, br));
        }
      }
    }
    return perm;
  }

  // Local minima of a pair's |difference| at column c that are not
  // bracketed by a sign change. The signed difference is minimized by
  // golden-section search: a sign flip at the minimum exposes two crossings
  // inside the two grid steps (a near-tangency the grid stepped over), which
  // are then bisected. Otherwise same-sector minima below the spacing
  // threshold are reported with their refined gap.
  void minima(const Column& p, const Column& c, const Column& n, const Perms& pp, const Perms& pn,
              std::vector<CrossingRecord>& out) const {
    if (in_collapse_step(p.h, n.h)) return;
    std::vector<std::vector<int>> inv(pp.size());
    for (std::size_t s = 0; s < pp.size(); ++s) {
      inv[s].assign(pp[s].size(), 0);
      for (std::size_t i = 0; i < pp[s].size(); ++i) inv[s][pp[s][i]] = static_cast<int>(i);
    }
    for (const PairType& pt : pairs_) {
      const int n1 = static_cast<int>(c.s[pt.s1].phases.size());
      const int n2 = static_cast<int>(c.s[pt.s2].phases.size());
      const double spacing = kTwoPi / static_cast<double>(std::max(n1, n2));
      for (int a = 0; a < n1; ++a) {
        for (int b = (pt.s1 == pt.s2 ? a + 1 : 0); b < n2; ++b) {
          const int ap = inv[pt.s1][a], bp = inv[pt.s2][b];
          const int an = pn[pt.s1][a], bn = pn[pt.s2][b];
          const double d0 = diff(p, pt, ap, bp);
          const double d1 = diff(c, pt, a, b);
          const double d2 = diff(n, pt, an, bn);
          if (negative(d0) != negative(d1) || negative(d1) != negative(d2)) continue;
          if (!(std::abs(d1) < std::abs(d0) && std::abs(d1) < std::abs(d2))) continue;
          if (!(std::abs(d1) < cfg_.minimum_fraction * spacing)) continue;
          const double sign = negative(d1) ? -1.0 : 1.0;
          Eval m = golden(p.h, n.h, c, pt, a, b, sign);
          if (m.f < 0.0) {
            out.push_back(bisect(p, m.c, pt, ap, bp, m.a, m.b));
            out.push_back(bisect(m.c, n, pt, m.a, m.b, an, bn));
            continue;
          }
          const bool adjacent = pt.s1 == pt.s2 && (b == a + 1 || (a == 0 && b == n1 - 1));
          if (adjacent || m.f <= cfg_.tau) out.push_back(make_record(m.c, pt, m.a, m.b, m.f));
        }
      }
    }
  }

  const std::vector<PairType>& pairs() const { return pairs_; }

 private:
  bool in_collapse_step(double lo, double hi) const { return collapse && lo <= kTwoPi && kTwoPi <= hi; }

  static double diff(const Column& c, const PairType& pt, int a, int b) {
    return wrap_difference(c.s[pt.s1].phases[a] - c.s[pt.s2].phases[b]);
  }

  CrossingRecord make_record(const Column& c, const PairType& pt, int a, int b, double gap) const {
    CrossingRecord r;
    r.heta_star = c.h;
    r.phase_star = circular_mean(c.s[pt.s1].phases[a], c.s[pt.s2].phases[b]);
    r.sector_pair = pt.label;
    r.level_ids = {a, b};
    if (pt.s1 == pt.s2 && a > b) r.level_ids = {b, a};
    r.gap_bound = gap;
    r.kind = classify_crossing(r, cfg_.tau);
    return r;
  }

  CrossingRecord bisect(Column l, Column r, const PairType& pt, int a, int b, int ar, int br) const {
    double dl = diff(l, pt, a, b);
    double dr = diff(r, pt, ar, br);
    for (int it = 0; it < cfg_.bisection_steps && std::min(std::abs(dl), std::abs(dr)) > cfg_.phase_target; ++it) {
      const double mid = 0.5 * (l.h + r.h);
      if (!(mid > l.h && mid < r.h)) break;
      Column m = column(mid);
      const std::vector<int> p1 = match_vectors(l.s[pt.s1].vectors, m.s[pt.s1].vectors);
      const std::vector<int> p2 =
          pt.s2 == pt.s1 ? p1 : match_vectors(l.s[pt.s2].vectors, m.s[pt.s2].vectors);
      const int am = p1[a];
      const int bm = p2[b];
      const double dm = diff(m, pt, am, bm);
      if (negative(dm) == negative(dl)) {
        l = std::move(m);
        a = am;
        b = bm;
        dl = dm;
      } else {
        r = std::move(m);
        ar = am;
        br = bm;
        dr = dm;
      }
    }
    if (std::abs(dl) <= std::abs(dr)) return make_record(l, pt, a, b, std::abs(dl));
    return make_record(r, pt, ar, br, std::abs(dr));
  }

  struct Eval {
    double f;
    Column c;
    int a;
    int b;
  };

  // Minimizes sign * difference over [lo, hi]; levels are identified by
  // overlap with the reference column. Stops early once the sign flips.
  Eval golden(double lo, double hi, const Column& ref, const PairType& pt, int a, int b, double sign) const {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto eval = [&](double h) {
      Column c = column(h);
      const std::vector<int> p1 = match_vectors(ref.s[pt.s1].vectors, c.s[pt.s1].vectors);
      const std::vector<int> p2 = pt.s2 == pt.s1 ? p1 : match_vectors(ref.s[pt.s2].vectors, c.s[pt.s2].vectors);
      const double f = sign * diff(c, pt, p1[a], p2[b]);
      return Eval{f, std::move(c), p1[a], p2[b]};
    };
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    Eval e1 = eval(x1);
    Eval e2 = eval(x2);
    for (int it = 0; it < cfg_.bisection_steps && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      if (std::min(e1.f, e2.f) <= cfg_.phase_target) break;
      if (e1.f <= e2.f) {
        hi = x2;
        x2 = x1;
        e2 = std::move(e1);
        x1 = hi - g * (hi - lo);
        e1 = eval(x1);
      } else {
        lo = x1;
        x1 = x2;
        e1 = std::move(e2);
        x2 = lo + g * (hi - lo);
        e2 = eval(x2);
      }
    }
    return e1.f <= e2.f ? std::move(e1) : std::move(e2);
  }

  const ModelParams& templ_;
  const CrossingScanConfig& cfg_;
  SpectrumSolver solver_;
  std::atomic<std::size_t>& evaluations_;
  bool xx_ = true;
  std::vector<PairType> pairs_;
};

bool same_crossing(const CrossingRecord& a, const CrossingRecord& b, double period) {
  double dh = std::abs(a.heta_star - b.heta_star);
  if (period > 0.0) dh = std::min(dh, period - dh);
  return dh < 1e-9 && a.sector_pair == b.sector_pair && a.level_ids == b.level_ids &&
         circular_distance(a.phase_star, b.phase_star) < 1e-6;
}

bool record_less(const CrossingRecord& a, const CrossingRecord& b) {
  if (a.heta_star != b.heta_star) return a.heta_star < b.heta_star;
  if (a.sector_pair != b.sector_pair) return a.sector_pair < b.sector_pair;
  if (a.level_ids != b.level_ids) return a.level_ids < b.level_ids;
  return a.phase_star < b.phase_star;
}

std::vector<CrossingRecord> deduplicate(std::vector<CrossingRecord> in, double period) {
  std::sort(in.begin(), in.end(), record_less);
  std::vector<CrossingRecord> out;
  for (auto& r : in) {
    bool merged = false;
    for (auto it = out.rbegin(); it != out.rend() && r.heta_star - it->heta_star < 1e-9; ++it) {
      if (same_crossing(*it, r, 0.0)) {
        if (r.gap_bound < it->gap_bound) *it = r;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(r));
  }
  // records folded across the period boundary
  if (period > 0.0) {
    while (out.size() > 1 && same_crossing(out.front(), out.back(), period)) {
      if (out.back().gap_bound < out.front().gap_bound) out.front() = out.back();
      out.pop_back();
    }
    std::sort(out.begin(), out.end(), record_less);
  }
  return out;
}

}  // namespace

CrossingScan find_crossings(const ModelParams& templ, const CrossingScanConfig& cfg, const Executor& exec) {
  templ.validate();
  const double j = templ.j();
  if (j > cfg.max_j) {
    std::ostringstream msg;
    msg << "crossing scan limited to J <= " << cfg.max_j << " (got " << j << ")";
    throw ConfigError(msg.str());
  }
  if (!(cfg.lo >= 0.0 && cfg.hi <= kFourPi && cfg.lo < cfg.hi)) throw ConfigError("scan range must lie in [0, 4pi)");
  if (!(cfg.density > 0.0)) throw ConfigError("scan density must be positive");
  if (templ.variant == Variant::XY && cfg.selection != SectorSelection::All)
    throw ConfigError("variant XY has no parity sectors; use selection 'all'");

  const bool full = cfg.lo == 0.0 && cfg.hi == kFourPi;
  const auto steps = static_cast<long>(std::ceil(cfg.density * j * j * j * (cfg.hi - cfg.lo) / kFourPi));
  const double dh = (cfg.hi - cfg.lo) / static_cast<double>(steps);
  const double offset = std::sqrt(2.0) - 1.0;  // keeps grid points off rational multiples of pi
  auto grid = [&](long k) { return cfg.lo + (static_cast<double>(k) + offset) * dh; };
  const long first = full ? 0 : -1;

  std::atomic<std::size_t> evaluations{0};
  Scanner scanner(templ, cfg, evaluations);
  CrossingScan scan;
  scan.grid_columns = static_cast<std::size_t>(steps - first + 1);

  std::vector<CrossingRecord> extra;
  if (templ.basis.integer_spin() && cfg.lo <= kTwoPi && kTwoPi < cfg.hi) {
    const SpectrumSolver solver(templ.basis);
    const EigenphaseSet at = eigenphases(solver.builder().floquet(templ.with_heta(kTwoPi)), false);
    const double spread = circular_spread(at.phases);
    if (spread <= cfg.tau) {
      scanner.collapse = true;
      scan.collapse = true;
      CrossingRecord r;
      r.heta_star = kTwoPi;
      double re = 0.0, im = 0.0;
      for (double p : at.phases) {
        re += std::cos(p);
        im += std::sin(p);
      }
      r.phase_star = wrap_phase(std::atan2(im, re));
      r.kind = CrossingKind::Collapse;
      switch (cfg.selection) {
        case SectorSelection::Even: r.sector_pair = SectorPair::EvenEven; break;
        case SectorSelection::Odd: r.sector_pair = SectorPair::OddOdd; break;
        case SectorSelection::DifferentParity: r.sector_pair = SectorPair::EvenOdd; break;
        case SectorSelection::All: r.sector_pair = SectorPair::Unresolved; break;
      }
      r.gap_bound = spread;
      extra.push_back(r);
    }
  }

  // fixed chunking keeps the result independent of the thread count
  const long brackets = steps - first;
  const long chunk_len = std::max<long>(64, (brackets + 63) / 64);
  const long chunks = (brackets + chunk_len - 1) / chunk_len;
  std::vector<std::vector<CrossingRecord>> found(static_cast<std::size_t>(chunks));
  std::vector<std::string> failures(static_cast<std::size_t>(chunks));
  exec.parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t ci) {
    const long kb = first + static_cast<long>(ci) * chunk_len;
    const long ke = std::min(steps, kb + chunk_len);
    auto& out = found[ci];
    try {
      Column prev = scanner.column(grid(kb - 1));
      Column cur = scanner.column(grid(kb));
      Perms pp = scanner.step(prev, cur, 0, false, out);
      for (long k = kb; k < ke; ++k) {
        Column next = scanner.column(grid(k + 1));
        Perms pn = scanner.step(cur, next, 0, true, out);
        if (k >= 0) scanner.minima(prev, cur, next, pp, pn, out);
        prev = std::move(cur);
        cur = std::move(next);
        pp = std::move(pn);
      }
    } catch (const BudgetHit& hit) {
      failures[ci] = hit.what;
    }
  });

  std::vector<CrossingRecord> all = std::move(extra);
  for (auto& v : found)
    for (auto& r : v) {
      if (full) {
        r.heta_star = std::fmod(r.heta_star, kFourPi);
        if (r.heta_star < 0.0) r.heta_star += kFourPi;
      } else if (r.heta_star < cfg.lo || r.heta_star >= cfg.hi) {
        continue;
      }
      all.push_back(std::move(r));
    }
  scan.records = deduplicate(std::move(all), full ? kFourPi : 0.0);
  scan.evaluations = evaluations.load();

  for (const auto& f : failures) {
    if (f.empty()) continue;
    for (auto& r : scan.records) r.partial = true;
    throw IncompleteScan(f, std::move(scan.records));
  }
  return scan;
}

CrossingCounts count_crossings(const std::vector<CrossingRecord>& records) {
  CrossingCounts c;
  for (const auto& r : records) {
    switch (r.kind) {
      case CrossingKind::DifferentParity: ++c.different_parity; break;
      case CrossingKind::SameParity: ++c.same_parity; break;
      case CrossingKind::Avoided: ++c.avoided; break;
      case CrossingKind::Collapse: ++c.collapse; break;
    }
  }
  return c;
}

double crossing_gap_at(const CrossingRecord& r, const ModelParams& templ) {
  const SpectrumSolver solver(templ.basis);
  const ModelParams p = templ.with_heta(r.heta_star);
  const UnitaryOperator u = solver.builder().floquet(p);
  if (r.kind == CrossingKind::Collapse) return circular_spread(eigenphases(u, false).phases);
  std::vector<double> first, second;
  if (r.sector_pair == SectorPair::Unresolved || templ.variant == Variant::XY) {
    first = eigenphases(u, false).phases;
    second = first;
  } else {
    const ParityBlocks pb = parity_blocks(u, solver.parity());
    const std::vector<double> even = eigenphases(pb.even, false).phases;
    const std::vector<double> odd = eigenphases(pb.odd, false).phases;
    first = r.sector_pair == SectorPair::OddOdd ? odd : even;
    second = r.sector_pair == SectorPair::EvenEven ? even : odd;
  }
  const bool same = r.sector_pair != SectorPair::EvenOdd;
  // the closest pair among the levels near the recorded phase
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (circular_distance(first[i], r.phase_star) > 1e-3) continue;
    for (std::size_t k = 0; k < second.size(); ++k) {
      if (same && k == i) continue;
      if (circular_distance(second[k], r.phase_star) > 1e-3) continue;
      best = std::min(best, circular_distance(first[i], second[k]));
    }
  }
  return best;
}

void mark_alpha_independence(std::vector<CrossingRecord>& records, const ModelParams& templ,
                             const std::vector<double>& alphas, double tol) {
  for (auto& r : records) {
    if (!r.is_true() || r.kind == CrossingKind::Collapse) continue;
    bool all = true;
    for (double a : alphas) {
      ModelParams p = templ;
      p.alpha_scaled = a;
      // the phase of the pair moves with alpha, so look for any close pair
      const SpectrumSolver solver(p.basis);
      const UnitaryOperator u = solver.builder().floquet(p.with_heta(r.heta_star));
      std::vector<double> first, second;
      if (r.sector_pair == SectorPair::Unresolved || p.variant == Variant::XY) {
        first = eigenphases(u, false).phases;
        second = first;
      } else {
        const ParityBlocks pb = parity_blocks(u, solver.parity());
        const std::vector<double> even = eigenphases(pb.even, false).phases;
        const std::vector<double> odd = eigenphases(pb.odd, false).phases;
        first = r.sector_pair == SectorPair::OddOdd ? odd : even;
        second = r.sector_pair == SectorPair::EvenEven ? even : odd;
      }
      const bool same = r.sector_pair != SectorPair::EvenOdd;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < first.size(); ++i)
        for (std::size_t k = 0; k < second.size(); ++k)
          if (!(same && k <= i)) best = std::min(best, circular_distance(first[i], second[k]));
      if (!(best <= tol)) {
        all = false;
        break;
      }
    }
    r.alpha_independent = all;
  }
}

ScalingFit scaling_fit(const std::vector<double>& j_values, const std::vector<double>& counts) {
  if (j_values.size() != counts.size()) throw ConfigError("scaling fit needs one count per J");
  std::set<double> distinct(j_values.begin(), j_values.end());
  if (distinct.size() < 5) throw ConfigError("scaling fit needs at least five distinct J values");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(counts[i] > 0.0) || !(j_values[i] > 0.0)) throw ConfigError("scaling fit needs positive J and counts");
    x.push_back(std::log(j_values[i]));
    y.push_back(std::log(counts[i]));
  }
  const LinearFit f = fit_line(x, y);
  return {f.slope, f.slope_std_error, f.intercept, f.r2};
}

LevelTracks track_levels(const ButterflyDataset& data, BasisTag sector, double min_overlap) {
  LevelTracks t;
  t.grid = data.grid;
  if (data.columns.empty()) return t;
  auto pick = [&](const SpectrumColumn& c) -> const EigenphaseSet& {
    const SectorSpectrum* s = c.sector(sector);
    if (!s) throw ConfigError(std::string("dataset has no sector '") + to_string(sector) + "'");
    if (!s->set.vectors) throw ConfigError("level tracking needs a dataset computed with eigenvectors");
    return s->set;
  };
  const std::size_t n = pick(data.columns.front()).size();
  t.phases.assign(n, std::vector<double>(data.columns.size()));
  t.unwrapped = t.phases;
  std::vector<int> where(n);
  for (std::size_t l = 0; l < n; ++l) where[l] = static_cast<int>(l);
  for (std::size_t k = 0; k < data.columns.size(); ++k) {
    const EigenphaseSet& cur = pick(data.columns[k]);
    if (k > 0) {
      const EigenphaseSet& prev = pick(data.columns[k - 1]);
      double o = 1.0;
      const std::vector<int> perm = match_vectors(*prev.vectors, *cur.vectors, &o);
      if (o < min_overlap) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "eigenvector overlap " << o << " below " << min_overlap << " between heta = " << data.grid[k - 1]
            << " and " << data.grid[k] << "; refine the grid";
        throw AmbiguousTracking(msg.str());
      }
      t.min_overlap = std::min(t.min_overlap, o);
      for (auto& w : where) w = perm[w];
    }
    for (std::size_t l = 0; l < n; ++l) {
      const double ph = cur.phases[where[l]];
      t.phases[l][k] = ph;
      t.unwrapped[l][k] = k == 0 ? ph : t.unwrapped[l][k - 1] + wrap_difference(ph - t.phases[l][k - 1]);
    }
  }
  return t;
}

}  // namespace su2floquet
