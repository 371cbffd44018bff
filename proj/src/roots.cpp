#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "regkit/error.hpp"
#include "regkit/spectral.hpp"

namespace regkit {

namespace {

constexpr double kMaxPhaseStep = std::numbers::pi / 4.0;
constexpr int kMaxEdgeDepth = 40;

// Memoizes g so that edges shared between neighbouring boxes are not
// recomputed.
class CachedFunction {
 public:
  explicit CachedFunction(const AnalyticFunction& g) : g_(g) {}

  const ScaledComplex& operator()(Complex z) {
    const auto key = std::make_pair(z.real(), z.imag());
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, g_(z)).first;
    return it->second;
  }

 private:
  const AnalyticFunction& g_;
  std::map<std::pair<double, double>, ScaledComplex> cache_;
};

bool usable(const ScaledComplex& v) {
  return v.mantissa != 0.0 && std::isfinite(std::abs(v.mantissa)) && std::isfinite(v.log_scale);
}

double log_abs(const ScaledComplex& v) { return std::log(std::abs(v.mantissa)) + v.log_scale; }

// Phase increment of g from a to b. A segment is accepted only when both
// halves turn by less than kMaxPhaseStep, agree with the whole, and |g|
// changes by at most a factor e; the midpoint test catches a full turn
// hidden between two samples.
std::optional<double> phase_change(CachedFunction& g, Complex a, Complex b, double min_len, int depth) {
  const Complex mid = 0.5 * (a + b);
  const ScaledComplex ga = g(a), gm = g(mid), gb = g(b);
  if (!usable(ga) || !usable(gm) || !usable(gb)) return std::nullopt;
  const double d1 = std::arg(gm.mantissa / ga.mantissa);
  const double d2 = std::arg(gb.mantissa / gm.mantissa);
  const double d = std::arg(gb.mantissa / ga.mantissa);
  const bool smooth = std::abs(d1) <= kMaxPhaseStep && std::abs(d2) <= kMaxPhaseStep &&
                      std::abs(d1 + d2 - d) < 1e-6 && std::abs(log_abs(gm) - log_abs(ga)) <= 1.0 &&
                      std::abs(log_abs(gb) - log_abs(gm)) <= 1.0;
  if (smooth) return d1 + d2;
  if (depth >= kMaxEdgeDepth || std::abs(b - a) < min_len) return std::nullopt;
  const auto left = phase_change(g, a, mid, min_len, depth + 1);
  if (!left) return std::nullopt;
  const auto right = phase_change(g, mid, b, min_len, depth + 1);
  if (!right) return std::nullopt;
  return *left + *right;
}

std::optional<int> winding(CachedFunction& g, const Rect& box, int edge_samples) {
  const Complex corners[4] = {{box.re0, box.im0}, {box.re1, box.im0}, {box.re1, box.im1}, {box.re0, box.im1}};
  const double scale = std::max({std::abs(box.width()), std::abs(box.height()), 1e-300});
  const double min_len = 1e-12 * std::max(scale, std::abs(box.center()));
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Complex p = corners[e];
    const Complex q = corners[(e + 1) % 4];
    Complex prev = p;
    for (int i = 1; i <= edge_samples; ++i) {
      const Complex next = (i == edge_samples) ? q : p + (q - p) * (static_cast<double>(i) / edge_samples);
      const auto d = phase_change(g, prev, next, min_len, 0);
      if (!d) return std::nullopt;
      total += *d;
      prev = next;
    }
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1) return std::nullopt;
  return static_cast<int>(rounded);
}

struct NewtonResult {
  Complex z;
  double step = HUGE_VAL;
  bool converged = false;
};

NewtonResult newton(const AnalyticFunction& g, Complex z, double tol, double max_travel) {
  NewtonResult out{z};
  const Complex start = z;
  double prev_step = HUGE_VAL;
  for (int it = 0; it < 60; ++it) {
    const double scale = std::max(1.0, std::abs(z));
    const double h = 1e-7 * scale;
    const ScaledComplex g0 = g(z);
    if (g0.mantissa == 0.0) {
      out.z = z;
      out.step = 0.0;
      out.converged = true;
      return out;
    }
    const ScaledComplex gp = g(z + h);
    const ScaledComplex gm = g(z - h);
    const Complex dp = gp.mantissa * std::exp(gp.log_scale - g0.log_scale);
    const Complex dm = gm.mantissa * std::exp(gm.log_scale - g0.log_scale);
    const Complex deriv = (dp - dm) / (2.0 * h);
    if (deriv == 0.0 || !std::isfinite(std::abs(deriv))) break;
    const Complex step = g0.mantissa / deriv;
    z -= step;
    const double s = std::abs(step);
    out.z = z;
    out.step = s;
    if (!std::isfinite(s) || std::abs(z - start) > max_travel) return out;
    if (s <= 1e-15 * scale) break;
    // Stop once the corrections stall at the noise floor.
    if (s <= tol * scale && s > 0.5 * prev_step) break;
    prev_step = s;
  }
  out.converged = out.step <= tol * std::max(1.0, std::abs(out.z));
  return out;
}

struct Box {
  Rect rect;
  int count;
};

}  // namespace

std::optional<int> winding_number(const AnalyticFunction& g, const Rect& box, int edge_samples) {
  CachedFunction cached(g);
  return winding(cached, box, edge_samples);
}

std::vector<RootRecord> find_zeros(const AnalyticFunction& g, Rect region, const RootOptions& opts) {
  if (!(region.re1 > region.re0) || !(region.im1 > region.im0))
    fail(ErrorCode::InvalidArgument, "root search region must have positive width and height");
  CachedFunction cached(g);

  std::optional<int> total;
  for (int attempt = 0; attempt <= opts.max_perturbations; ++attempt) {
    total = winding(cached, region, opts.edge_samples);
    if (total) break;
    // Nudge the boundary outward off a zero that sits on it.
    const double dx = 1e-3 * (attempt + 1) * std::max(region.width(), 1.0);
    const double dy = 1e-3 * (attempt + 1) * std::max(region.height(), 1.0);
    region = {region.re0 - 0.7 * dx, region.re1 + 0.3 * dx, region.im0 - 0.6 * dy, region.im1 + 0.4 * dy};
  }
  if (!total) fail(ErrorCode::WindingMismatch, "winding number along the region boundary is unstable");
  if (*total < 0) fail(ErrorCode::WindingMismatch, "negative winding number: function is not analytic in region");

  std::vector<RootRecord> roots;
  std::vector<Box> stack;
  if (*total > 0) stack.push_back({region, *total});
  const double region_scale = std::max({region.width(), region.height(), std::abs(region.center()), 1.0});

  while (!stack.empty()) {
    const Box box = stack.back();
    stack.pop_back();
    const Rect& r = box.rect;
    const double diam = std::hypot(r.width(), r.height());
    const double cscale = std::max(1.0, std::abs(r.center()));

    if (diam < 10.0 * opts.tol * cscale) {
      roots.push_back({r.center(), box.count, diam});
      continue;
    }
    if (box.count == 1) {
      const NewtonResult nr = newton(g, r.center(), opts.tol, 4.0 * diam);
      if (nr.converged && r.contains(nr.z)) {
        roots.push_back({nr.z, 1, nr.step});
        continue;
      }
    }

    bool split_ok = false;
    const bool along_re = r.width() >= r.height();
    for (double frac : {0.47, 0.43, 0.53, 0.39, 0.61, 0.35, 0.65}) {
      Rect a = r, b = r;
      if (along_re) {
        const double cut = r.re0 + frac * r.width();
        a.re1 = cut;
        b.re0 = cut;
      } else {
        const double cut = r.im0 + frac * r.height();
        a.im1 = cut;
        b.im0 = cut;
      }
      const auto ca = winding(cached, a, opts.edge_samples);
      if (!ca || *ca < 0) continue;
      const auto cb = winding(cached, b, opts.edge_samples);
      if (!cb || *cb < 0 || *ca + *cb != box.count) continue;
      if (*ca > 0) stack.push_back({a, *ca});
      if (*cb > 0) stack.push_back({b, *cb});
      split_ok = true;
      break;
    }
    if (!split_ok) {
      if (diam < 1e-6 * region_scale) {
        // A cluster too tight to separate by winding: report it once.
        roots.push_back({r.center(), box.count, diam});
        continue;
      }
      fail(ErrorCode::WindingMismatch, "could not split a search box consistently");
    }
  }

  int found = 0;
  for (const auto& root : roots) found += root.multiplicity;
  if (found != *total)
    fail(ErrorCode::WindingMismatch, "located " + std::to_string(found) + " zeros but winding number is " +
                                         std::to_string(*total));
  std::sort(roots.begin(), roots.end(), [](const RootRecord& a, const RootRecord& b) {
    const double ma = std::abs(a.z), mb = std::abs(b.z);
    if (ma != mb) return ma < mb;
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return roots;
}

}  // namespace regkit
