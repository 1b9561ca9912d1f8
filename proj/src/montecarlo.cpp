#include "tethercov/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "tethercov/parallel.hpp"

namespace tethercov {

namespace {

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

template <std::size_t K>
struct Moments {
  std::array<KahanSum, K> s{};
  std::array<KahanSum, K> s2{};
  std::uint64_t n = 0;
};

// Runs `draw(rng, values)` n_samples times in seeded batches and returns
// order-independent per-channel first and second moments.
template <std::size_t K, class Draw>
Moments<K> run_batched(const McConfig& cfg, Draw&& draw) {
  cfg.validate();
  const std::uint64_t batches = (cfg.n_samples + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<Moments<K>> parts(batches);
  parallel_for(batches, [&](std::size_t b) {
    Rng rng = make_stream(cfg.seed, b);
    const std::uint64_t begin = b * cfg.batch_size;
    const std::uint64_t count = std::min(cfg.batch_size, cfg.n_samples - begin);
    Moments<K>& m = parts[b];
    std::array<double, K> v{};
    for (std::uint64_t i = 0; i < count; ++i) {
      v.fill(0.0);
      draw(rng, v);
      for (std::size_t k = 0; k < K; ++k) {
        m.s[k].add(v[k]);
        m.s2[k].add(v[k] * v[k]);
      }
    }
    m.n = count;
  });
  Moments<K> total;
  for (const auto& p : parts) {
    for (std::size_t k = 0; k < K; ++k) {
      total.s[k].add(p.s[k].sum);
      total.s2[k].add(p.s2[k].sum);
    }
    total.n += p.n;
  }
  return total;
}

template <std::size_t K>
McEstimate estimate_of(const Moments<K>& m, std::size_t k) {
  McEstimate e;
  e.n = m.n;
  const double n = static_cast<double>(m.n);
  e.mean = m.s[k].sum / n;
  if (m.n > 1) {
    const double var = std::max(0.0, (m.s2[k].sum - n * e.mean * e.mean) / (n - 1.0));
    e.std_error = std::sqrt(var / n);
  }
  return e;
}

double snr_tbs(const Scenario& s, const Point2& user, double gain) {
  const double d = distance3(s.tbs, {user.x, user.y, 0.0});
  return s.link.rho_b * gain * std::pow(d, -s.link.alpha_b) / s.link.sigma_n2;
}

double snr_aerial(const Scenario& s, double d, bool los, double gain) {
  const double eta = los ? s.link.eta_los : s.link.eta_nlos;
  return s.link.rho_u * gain * std::pow(d, -s.link.alpha_u) / (s.link.sigma_n2 * eta);
}

Histogram make_histogram(std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw ConfigError("histogram needs bins > 0 and hi > lo");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.mass.assign(bins, 0.0);
  return h;
}

void fill(Histogram& h, const std::vector<std::vector<std::uint64_t>>& counts, std::uint64_t n) {
  const std::size_t bins = h.mass.size();
  std::vector<std::uint64_t> total(bins + 2, 0);
  for (const auto& c : counts) {
    for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];
  }
  const double nd = static_cast<double>(n);
  h.underflow = static_cast<double>(total[bins]) / nd;
  h.overflow = static_cast<double>(total[bins + 1]) / nd;
  for (std::size_t i = 0; i < bins; ++i) h.mass[i] = static_cast<double>(total[i]) / nd;
  h.n = n;
}

void count_into(std::vector<std::uint64_t>& c, const Histogram& h, double r) {
  const std::size_t bins = h.mass.size();
  if (r < h.lo) {
    ++c[bins];
  } else if (r >= h.hi) {
    ++c[bins + 1];
  } else {
    const auto i = static_cast<std::size_t>((r - h.lo) / (h.hi - h.lo) * static_cast<double>(bins));
    ++c[std::min(i, bins - 1)];
  }
}

}  // namespace

void McConfig::validate() const {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (const auto* g = std::get_if<GaussianUsers>(&users); g && !(g->std_dev >= 0.0)) {
    throw ConfigError("Gaussian user std must be >= 0");
  }
}

Point2 sample_user(Rng& rng, const HotSpot& hs, const UserDistribution& dist) {
  if (const auto* g = std::get_if<GaussianUsers>(&dist)) {
    if (g->std_dev == 0.0) return hs.center;
    std::normal_distribution<double> n(0.0, g->std_dev);
    for (;;) {
      const Point2 p{hs.center.x + n(rng), hs.center.y + n(rng)};
      if (distance2(p, hs.center) <= hs.radius) return p;
    }
  }
  const double r = hs.radius * std::sqrt(uniform01(rng));
  const double t = kTwoPi * uniform01(rng);
  return {hs.center.x + r * std::cos(t), hs.center.y + r * std::sin(t)};
}

Histogram estimate_distance_pdf(const McConfig& cfg, const HotSpot& hs, const Point2& anchor,
                                std::size_t bins, double lo, double hi) {
  cfg.validate();
  Histogram h = make_histogram(bins, lo, hi);
  const std::uint64_t batches = (cfg.n_samples + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<std::vector<std::uint64_t>> counts(batches, std::vector<std::uint64_t>(bins + 2, 0));
  parallel_for(batches, [&](std::size_t b) {
    Rng rng = make_stream(cfg.seed, b);
    const std::uint64_t count = std::min(cfg.batch_size, cfg.n_samples - b * cfg.batch_size);
    for (std::uint64_t i = 0; i < count; ++i) {
      count_into(counts[b], h, distance2(sample_user(rng, hs, cfg.users), anchor));
    }
  });
  fill(h, counts, cfg.n_samples);
  return h;
}

Histogram estimate_conditional_distance_pdf(const McConfig& cfg, const HotSpot& hs, const Point2& tbs,
                                            const Point2& uav, double r_b, double band,
                                            std::size_t bins, double lo, double hi) {
  cfg.validate();
  if (!(band > 0.0)) throw ConfigError("band must be positive");
  Histogram h = make_histogram(bins, lo, hi);
  const double inner = std::max(0.0, r_b - band);
  const double outer = r_b + band;
  const std::uint64_t batches = (cfg.n_samples + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<std::vector<std::uint64_t>> counts(batches, std::vector<std::uint64_t>(bins + 2, 0));
  parallel_for(batches, [&](std::size_t b) {
    Rng rng = make_stream(cfg.seed, b);
    const std::uint64_t count = std::min(cfg.batch_size, cfg.n_samples - b * cfg.batch_size);
    std::uint64_t kept = 0;
    std::uint64_t tries = 0;
    while (kept < count) {
      if (++tries > 1000 * count + 1000000) throw ConfigError("conditioning band misses the hot-spot");
      // Uniform over the annulus: radius with density proportional to r.
      const double r = std::sqrt(inner * inner + uniform01(rng) * (outer * outer - inner * inner));
      const double t = kTwoPi * uniform01(rng);
      const Point2 p{tbs.x + r * std::cos(t), tbs.y + r * std::sin(t)};
      if (distance2(p, hs.center) > hs.radius) continue;
      ++kept;
      count_into(counts[b], h, distance2(p, uav));
    }
  });
  fill(h, counts, cfg.n_samples);
  return h;
}

McEstimate estimate_link_coverage(const McConfig& cfg, const Scenario& s, const LinkKind& link) {
  s.validate();
  const double beta = s.threshold.beta;
  const int m = s.link.m;
  if (std::holds_alternative<TbsLink>(link)) {
    const auto mom = run_batched<1>(cfg, [&](Rng& rng, std::array<double, 1>& v) {
      const Point2 u = sample_user(rng, s.hotspot, cfg.users);
      v[0] = snr_tbs(s, u, sample_rayleigh_gain(rng, s.link.mu)) > beta ? 1.0 : 0.0;
    });
    return estimate_of(mom, 0);
  }
  if (const auto* a = std::get_if<UavAccessLink>(&link)) {
    const Point3 uav = a->uav;
    const auto mom = run_batched<1>(cfg, [&](Rng& rng, std::array<double, 1>& v) {
      const Point2 u = sample_user(rng, s.hotspot, cfg.users);
      const bool los = uniform01(rng) < los_probability_access(s.env, uav, u);
      const double d = distance3(uav, {u.x, u.y, 0.0});
      v[0] = snr_aerial(s, d, los, sample_nakagami_gain(rng, m)) > beta ? 1.0 : 0.0;
    });
    return estimate_of(mom, 0);
  }
  const Point3 uav = std::get<BackhaulLink>(link).uav;
  const double kappa = los_probability_backhaul(s.env, s.tbs, uav);
  const double d = distance3(s.tbs, uav);
  const auto mom = run_batched<1>(cfg, [&](Rng& rng, std::array<double, 1>& v) {
    const bool los = uniform01(rng) < kappa;
    v[0] = snr_aerial(s, d, los, sample_nakagami_gain(rng, m)) > beta ? 1.0 : 0.0;
  });
  return estimate_of(mom, 0);
}

McSystemEstimate estimate_system_coverage(const McConfig& cfg, const Scenario& s, const Point3& uav,
                                          const UavMode& mode) {
  s.validate();
  mode.validate();
  const double beta = s.threshold.beta;
  const int m = s.link.m;
  const bool untethered = mode.kind == UavMode::Kind::Untethered;
  const double kappa_bu = untethered ? los_probability_backhaul(s.env, s.tbs, uav) : 1.0;
  const double d_bu = distance3(s.tbs, uav);
  // Channels: covered, associated, then covered split by serving path.
  const auto mom = run_batched<7>(cfg, [&](Rng& rng, std::array<double, 7>& v) {
    const Point2 u = sample_user(rng, s.hotspot, cfg.users);
    const bool los = uniform01(rng) < los_probability_access(s.env, uav, u);
    const bool available = !untethered || uniform01(rng) < mode.duty_cycle;
    bool covered = false;
    if (!available) {
      covered = snr_tbs(s, u, sample_rayleigh_gain(rng, s.link.mu)) > beta;
      v[6] = covered ? 1.0 : 0.0;
    } else if (mean_snr_aerial(s.link, uav, u, los) > mean_snr_terrestrial(s.link, s.tbs, u)) {
      v[1] = 1.0;
      const double d = distance3(uav, {u.x, u.y, 0.0});
      covered = snr_aerial(s, d, los, sample_nakagami_gain(rng, m)) > beta;
      if (untethered) {
        const bool los_bu = uniform01(rng) < kappa_bu;
        covered = covered && snr_aerial(s, d_bu, los_bu, sample_nakagami_gain(rng, m)) > beta;
      }
      v[los ? 2 : 3] = covered ? 1.0 : 0.0;
    } else {
      covered = snr_tbs(s, u, sample_rayleigh_gain(rng, s.link.mu)) > beta;
      v[los ? 4 : 5] = covered ? 1.0 : 0.0;
    }
    v[0] = covered ? 1.0 : 0.0;
  });
  McSystemEstimate out;
  out.coverage = estimate_of(mom, 0);
  out.association = estimate_of(mom, 1);
  out.shares.uav_los = estimate_of(mom, 2).mean;
  out.shares.uav_nlos = estimate_of(mom, 3).mean;
  out.shares.tbs_los_region = estimate_of(mom, 4).mean;
  out.shares.tbs_nlos_region = estimate_of(mom, 5).mean;
  out.shares.unavailable = estimate_of(mom, 6).mean;
  return out;
}

McEstimate estimate_association_probability(const McConfig& cfg, const Scenario& s, const Point3& uav,
                                            const UavMode& mode) {
  s.validate();
  mode.validate();
  const bool untethered = mode.kind == UavMode::Kind::Untethered;
  const auto mom = run_batched<1>(cfg, [&](Rng& rng, std::array<double, 1>& v) {
    const Point2 u = sample_user(rng, s.hotspot, cfg.users);
    const bool los = uniform01(rng) < los_probability_access(s.env, uav, u);
    const bool available = !untethered || uniform01(rng) < mode.duty_cycle;
    v[0] = available && mean_snr_aerial(s.link, uav, u, los) > mean_snr_terrestrial(s.link, s.tbs, u)
               ? 1.0
               : 0.0;
  });
  return estimate_of(mom, 0);
}

}  // namespace tethercov
