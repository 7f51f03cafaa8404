#include "tnn/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <ostream>

#include "tnn/util.hpp"

namespace tnn {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Exactness over silent wrap: rational intermediates are guarded and any
// genuine exceedance of 128 bits aborts the computation loudly.
__int128 checked_mul(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw DataError("exact rational arithmetic exceeds 128 bits");
  }
  return r;
}

__int128 checked_add(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw DataError("exact rational arithmetic exceeds 128 bits");
  }
  return r;
}

// Compares a_n/a_d vs b_n/b_d for non-negative numerators by continued
// fractions; never forms cross products, so it cannot overflow.
int cmp_nonneg(__int128 a_n, __int128 a_d, __int128 b_n, __int128 b_d) {
  while (true) {
    __int128 qa = a_n / a_d;
    __int128 qb = b_n / b_d;
    if (qa != qb) return qa < qb ? -1 : 1;
    __int128 ra = a_n % a_d;
    __int128 rb = b_n % b_d;
    if (ra == 0 && rb == 0) return 0;
    if (ra == 0) return -1;
    if (rb == 0) return 1;
    // a < b iff ra/a_d < rb/b_d iff b_d/rb < a_d/ra.
    a_n = b_d;
    b_n = a_d;
    a_d = rb;
    b_d = ra;
  }
}

int cmp_rational(const Rational& a, const Rational& b) {
  bool a_neg = a.num < 0;
  bool b_neg = b.num < 0;
  if (a_neg != b_neg) return a_neg ? -1 : 1;
  if (a_neg) return cmp_nonneg(-b.num, b.den, -a.num, a.den);
  return cmp_nonneg(a.num, a.den, b.num, b.den);
}

}  // namespace

Rational Rational::make(__int128 n, __int128 d) {
  assert(d != 0);
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Rational{n, d};
}

Rational Rational::plus(const Rational& o) const {
  // Common denominator is the lcm; dividing by the gcd first keeps the
  // factors as small as the result allows.
  __int128 g = gcd128(den, o.den);
  __int128 mine = den / g;
  __int128 theirs = o.den / g;
  __int128 l = checked_mul(mine, o.den);
  __int128 n = checked_add(checked_mul(num, theirs), checked_mul(o.num, mine));
  return make(n, l);
}

Rational Rational::minus(const Rational& o) const {
  return plus(Rational{-o.num, o.den});
}

Rational Rational::abs() const { return Rational{num < 0 ? -num : num, den}; }

Rational Rational::over(__int128 k) const {
  assert(k > 0);
  __int128 g = gcd128(num, k);
  return make(num / g, checked_mul(den, k / g));
}

bool Rational::less(const Rational& o) const {
  return cmp_rational(*this, o) < 0;
}

bool Rational::leq(const Rational& o) const {
  return cmp_rational(*this, o) <= 0;
}

bool Rational::eq(const Rational& o) const {
  return num == o.num && den == o.den;
}

std::string Rational::to_decimal6() const {
  bool neg = num < 0;
  __int128 n = neg ? -num : num;
  __int128 whole = n / den;
  __int128 rem = n % den;
  // One digit at a time; rem stays below den, so the only growth is a
  // single factor of 10 per step.
  __int128 frac7 = 0;
  for (int i = 0; i < 7; ++i) {
    rem = checked_mul(rem, 10);
    frac7 = frac7 * 10 + rem / den;
    rem %= den;
  }
  __int128 frac = frac7 / 10 + (frac7 % 10 >= 5 ? 1 : 0);
  if (frac >= 1000000) {
    frac -= 1000000;
    whole += 1;
  }
  std::string f = int128_to_string(frac);
  f.insert(f.begin(), 6 - f.size(), '0');
  return (neg ? "-" : "") + int128_to_string(whole) + "." + f;
}

std::string Rational::num_string() const { return int128_to_string(num); }
std::string Rational::den_string() const { return int128_to_string(den); }

int64_t sad(std::span<const uint8_t> a, std::span<const uint8_t> b) {
  assert(a.size() == b.size());
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    s += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  }
  return s;
}

Rational sad(std::span<const Rational> a, std::span<const Rational> b) {
  assert(a.size() == b.size());
  Rational s{0, 1};
  for (size_t i = 0; i < a.size(); ++i) {
    s = s.plus(a[i].minus(b[i]).abs());
  }
  return s;
}

int64_t sad_scaled(std::span<const uint8_t> pattern,
                   std::span<const int64_t> sums, int64_t count) {
  assert(pattern.size() == sums.size());
  assert(count > 0);
  int64_t s = 0;
  for (size_t i = 0; i < pattern.size(); ++i) {
    int64_t d = int64_t{pattern[i]} * count - sums[i];
    s += d < 0 ? -d : d;
  }
  return s;
}

IntervalTracker::IntervalTracker(uint64_t interval_len)
    : interval_len_(interval_len) {
  assert(interval_len_ >= 1);
}

void IntervalTracker::record(bool error, bool tie, bool no_prediction) {
  cur_inputs_ += 1;
  cur_errors_ += error ? 1 : 0;
  cur_ties_ += tie ? 1 : 0;
  cur_no_predictions_ += no_prediction ? 1 : 0;
  if (cur_inputs_ == interval_len_) flush();
}

void IntervalTracker::flush() {
  if (cur_inputs_ == 0) return;
  cum_inputs_ += cur_inputs_;
  cum_errors_ += cur_errors_;
  records_.push_back(IntervalRecord{cum_inputs_, cur_inputs_, cur_errors_,
                                    cur_ties_, cur_no_predictions_,
                                    cum_errors_, cum_inputs_});
  cur_inputs_ = cur_errors_ = cur_ties_ = cur_no_predictions_ = 0;
}

void IntervalTracker::save(std::ostream& os) const {
  write_u64(os, interval_len_);
  write_u64(os, cum_inputs_);
  write_u64(os, cum_errors_);
  write_u64(os, cur_inputs_);
  write_u64(os, cur_errors_);
  write_u64(os, cur_ties_);
  write_u64(os, cur_no_predictions_);
  write_u64(os, records_.size());
  for (const IntervalRecord& r : records_) {
    write_u64(os, r.interval_end);
    write_u64(os, r.inputs);
    write_u64(os, r.errors);
    write_u64(os, r.ties);
    write_u64(os, r.no_predictions);
    write_u64(os, r.cum_errors);
    write_u64(os, r.cum_inputs);
  }
}

void IntervalTracker::load(std::istream& is) {
  interval_len_ = read_u64(is, "tracker interval length");
  cum_inputs_ = read_u64(is, "tracker inputs");
  cum_errors_ = read_u64(is, "tracker errors");
  cur_inputs_ = read_u64(is, "tracker partial inputs");
  cur_errors_ = read_u64(is, "tracker partial errors");
  cur_ties_ = read_u64(is, "tracker partial ties");
  cur_no_predictions_ = read_u64(is, "tracker partial no-predictions");
  uint64_t n = read_u64(is, "tracker record count");
  records_.clear();
  records_.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    IntervalRecord r;
    r.interval_end = read_u64(is, "record interval end");
    r.inputs = read_u64(is, "record inputs");
    r.errors = read_u64(is, "record errors");
    r.ties = read_u64(is, "record ties");
    r.no_predictions = read_u64(is, "record no-predictions");
    r.cum_errors = read_u64(is, "record cumulative errors");
    r.cum_inputs = read_u64(is, "record cumulative inputs");
    records_.push_back(r);
  }
}

ClusterSnapshot::ClusterSnapshot(uint32_t pattern_len, uint32_t clusters)
    : pattern_len_(pattern_len), clusters_(clusters), data_(clusters) {}

void ClusterSnapshot::observe(std::span<const SpikeTime> x_norm,
                              int32_t winner, SpikeTime out_time,
                              uint32_t inf_value) {
  total_inputs_ += 1;
  if (winner < 0) return;
  assert(x_norm.size() == pattern_len_);
  assert(out_time.is_finite());
  assert(inf_value <= 255 && out_time.value() <= 255);
  std::vector<uint8_t>& bucket = data_[static_cast<size_t>(winner)];
  size_t base = bucket.size();
  bucket.resize(base + pattern_len_ + 1);
  for (size_t i = 0; i < x_norm.size(); ++i) {
    uint32_t v = x_norm[i].is_inf() ? inf_value : x_norm[i].value();
    assert(v <= 255);
    bucket[base + i] = static_cast<uint8_t>(v);
  }
  bucket[base + pattern_len_] = static_cast<uint8_t>(out_time.value());
}

uint64_t ClusterSnapshot::members(uint32_t k) const {
  return data_[k].size() / (pattern_len_ + 1);
}

std::span<const uint8_t> ClusterSnapshot::pattern(uint32_t k,
                                                  uint64_t m) const {
  return std::span<const uint8_t>(data_[k]).subspan(m * (pattern_len_ + 1),
                                                    pattern_len_);
}

uint8_t ClusterSnapshot::out_time(uint32_t k, uint64_t m) const {
  return data_[k][m * (pattern_len_ + 1) + pattern_len_];
}

void ClusterSnapshot::save(std::ostream& os) const {
  write_u32(os, pattern_len_);
  write_u32(os, clusters_);
  write_u64(os, total_inputs_);
  for (const std::vector<uint8_t>& bucket : data_) {
    write_u64(os, bucket.size());
    write_bytes(os, bucket);
  }
}

ClusterSnapshot ClusterSnapshot::load(std::istream& is) {
  uint32_t plen = read_u32(is, "snapshot pattern length");
  uint32_t q = read_u32(is, "snapshot cluster count");
  if (plen == 0 || q == 0 || plen > 1 << 20 || q > 1 << 20) {
    throw DataError("snapshot header is implausible");
  }
  ClusterSnapshot snap(plen, q);
  snap.total_inputs_ = read_u64(is, "snapshot input count");
  for (uint32_t k = 0; k < q; ++k) {
    uint64_t bytes = read_u64(is, "snapshot bucket size");
    if (bytes % (plen + 1) != 0) {
      throw DataError("snapshot bucket size is not a whole number of members");
    }
    snap.data_[k].resize(bytes);
    read_bytes(is, snap.data_[k], "snapshot bucket data");
  }
  return snap;
}

ColumnConvergence centroid_convergence(const ClusterSnapshot& snap) {
  const uint32_t q = snap.clusters();
  const uint32_t plen = snap.pattern_len();
  std::vector<std::vector<int64_t>> sums(q);
  std::vector<int64_t> counts(q, 0);
  for (uint32_t k = 0; k < q; ++k) {
    uint64_t n = snap.members(k);
    counts[k] = static_cast<int64_t>(n);
    if (n == 0) continue;
    sums[k].assign(plen, 0);
    for (uint64_t m = 0; m < n; ++m) {
      std::span<const uint8_t> p = snap.pattern(k, m);
      for (uint32_t i = 0; i < plen; ++i) sums[k][i] += p[i];
    }
  }
  ColumnConvergence out;
  for (uint32_t k = 0; k < q; ++k) {
    uint64_t n = snap.members(k);
    for (uint64_t m = 0; m < n; ++m) {
      std::span<const uint8_t> p = snap.pattern(k, m);
      int64_t own = sad_scaled(p, sums[k], counts[k]);
      bool own_is_min = true;
      for (uint32_t k2 = 0; k2 < q && own_is_min; ++k2) {
        if (k2 == k || counts[k2] == 0) continue;
        int64_t other = sad_scaled(p, sums[k2], counts[k2]);
        // own/counts[k] <= other/counts[k2], cross-multiplied.
        if (static_cast<__int128>(own) * counts[k2] >
            static_cast<__int128>(other) * counts[k]) {
          own_is_min = false;
        }
      }
      out.members += 1;
      out.matches += own_is_min ? 1 : 0;
    }
  }
  return out;
}

std::vector<RbfBucket> rbf_profile(const ClusterSnapshot& snap) {
  const uint32_t q = snap.clusters();
  const uint32_t plen = snap.pattern_len();
  std::vector<std::vector<int64_t>> sums(q);
  std::vector<int64_t> counts(q, 0);
  for (uint32_t k = 0; k < q; ++k) {
    uint64_t n = snap.members(k);
    counts[k] = static_cast<int64_t>(n);
    if (n == 0) continue;
    sums[k].assign(plen, 0);
    for (uint64_t m = 0; m < n; ++m) {
      std::span<const uint8_t> p = snap.pattern(k, m);
      for (uint32_t i = 0; i < plen; ++i) sums[k][i] += p[i];
    }
  }
  // Integer totals per (bucket, cluster); members of one cluster share a
  // centroid, so their sad values share the denominator counts[k]. The
  // rational fold then runs over at most q terms per bucket.
  struct Acc {
    uint64_t members = 0;
    std::vector<int64_t> scaled_by_cluster;
  };
  std::vector<Acc> acc(256);
  for (uint32_t k = 0; k < q; ++k) {
    uint64_t n = snap.members(k);
    for (uint64_t m = 0; m < n; ++m) {
      int64_t scaled = sad_scaled(snap.pattern(k, m), sums[k], counts[k]);
      uint8_t t = snap.out_time(k, m);
      if (acc[t].scaled_by_cluster.empty()) {
        acc[t].scaled_by_cluster.assign(q, 0);
      }
      acc[t].members += 1;
      acc[t].scaled_by_cluster[k] += scaled;
    }
  }
  std::vector<RbfBucket> buckets;
  for (uint32_t t = 0; t < acc.size(); ++t) {
    if (acc[t].members == 0) continue;
    Rational total{0, 1};
    for (uint32_t k = 0; k < q; ++k) {
      if (acc[t].scaled_by_cluster[k] == 0) continue;
      total = total.plus(Rational::make(acc[t].scaled_by_cluster[k], counts[k]));
    }
    RbfBucket b;
    b.spike_time = t;
    b.members = acc[t].members;
    b.mean_sad = total.over(acc[t].members);
    b.coverage = Rational::make(acc[t].members, snap.total_inputs());
    buckets.push_back(b);
  }
  return buckets;
}

}  // namespace tnn
