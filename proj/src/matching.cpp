#include "hwd/matching.hpp"

#include <algorithm>
#include <cmath>

#include "hwd/error.hpp"

namespace hwd {

namespace {

using I = std::ptrdiff_t;

class BlossomMatcher {
 public:
  BlossomMatcher(std::size_t n, const std::vector<WeightedEdge>& edges, bool max_cardinality)
      : nv_(static_cast<I>(n)), edges_(edges), maxcard_(max_cardinality) {}

  std::vector<I> run();

 private:
  I nv_;
  const std::vector<WeightedEdge>& edges_;
  bool maxcard_;

  std::vector<I> endpoint_;
  std::vector<std::vector<I>> neighbend_;
  std::vector<I> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_;
  std::vector<std::vector<I>> blossomchilds_, blossomendps_, blossombestedges_;
  std::vector<char> has_bestedges_;
  std::vector<I> unused_;
  std::vector<std::int64_t> dual_;
  std::vector<char> allowedge_;
  std::vector<I> queue_;

  I ev(I k, int side) const {
    const auto& e = edges_[static_cast<std::size_t>(k)];
    return static_cast<I>(side == 0 ? e.u : e.v);
  }
  std::int64_t slack(I k) const {
    const auto& e = edges_[static_cast<std::size_t>(k)];
    return dual_[e.u] + dual_[e.v] - 2 * e.weight;
  }
  static std::size_t z(I i) { return static_cast<std::size_t>(i); }

  void leaves(I b, std::vector<I>& out) const {
    if (b < nv_) {
      out.push_back(b);
      return;
    }
    for (I t : blossomchilds_[z(b)]) leaves(t, out);
  }
  std::vector<I> leaves(I b) const {
    std::vector<I> out;
    leaves(b, out);
    return out;
  }

  void assign_label(I w, I t, I p);
  I scan_blossom(I v, I w);
  void add_blossom(I base, I k);
  void expand_blossom(I b, bool endstage);
  void augment_blossom(I b, I v);
  void augment_matching(I k);
};

void BlossomMatcher::assign_label(I w, I t, I p) {
  const I b = inblossom_[z(w)];
  label_[z(w)] = label_[z(b)] = t;
  labelend_[z(w)] = labelend_[z(b)] = p;
  bestedge_[z(w)] = bestedge_[z(b)] = -1;
  if (t == 1) {
    leaves(b, queue_);
  } else if (t == 2) {
    const I base = blossombase_[z(b)];
    assign_label(endpoint_[z(mate_[z(base)])], 1, mate_[z(base)] ^ 1);
  }
}

I BlossomMatcher::scan_blossom(I v, I w) {
  std::vector<I> path;
  I base = -1;
  while (v != -1 || w != -1) {
    I b = inblossom_[z(v)];
    if (label_[z(b)] & 4) {
      base = blossombase_[z(b)];
      break;
    }
    path.push_back(b);
    label_[z(b)] = 5;
    if (labelend_[z(b)] == -1) {
      v = -1;
    } else {
      v = endpoint_[z(labelend_[z(b)])];
      b = inblossom_[z(v)];
      v = endpoint_[z(labelend_[z(b)])];
    }
    if (w != -1) std::swap(v, w);
  }
  for (I b : path) label_[z(b)] = 1;
  return base;
}

void BlossomMatcher::add_blossom(I base, I k) {
  I v = ev(k, 0), w = ev(k, 1);
  const I bb = inblossom_[z(base)];
  I bv = inblossom_[z(v)];
  I bw = inblossom_[z(w)];
  const I b = unused_.back();
  unused_.pop_back();
  blossombase_[z(b)] = base;
  blossomparent_[z(b)] = -1;
  blossomparent_[z(bb)] = b;
  std::vector<I> path, endps;
  while (bv != bb) {
    blossomparent_[z(bv)] = b;
    path.push_back(bv);
    endps.push_back(labelend_[z(bv)]);
    v = endpoint_[z(labelend_[z(bv)])];
    bv = inblossom_[z(v)];
  }
  path.push_back(bb);
  std::reverse(path.begin(), path.end());
  std::reverse(endps.begin(), endps.end());
  endps.push_back(2 * k);
  while (bw != bb) {
    blossomparent_[z(bw)] = b;
    path.push_back(bw);
    endps.push_back(labelend_[z(bw)] ^ 1);
    w = endpoint_[z(labelend_[z(bw)])];
    bw = inblossom_[z(w)];
  }
  blossomchilds_[z(b)] = path;
  blossomendps_[z(b)] = endps;
  label_[z(b)] = 1;
  labelend_[z(b)] = labelend_[z(bb)];
  dual_[z(b)] = 0;
  for (I leaf : leaves(b)) {
    if (label_[z(inblossom_[z(leaf)])] == 2) queue_.push_back(leaf);
    inblossom_[z(leaf)] = b;
  }

  std::vector<I> bestedgeto(z(2 * nv_), -1);
  for (I child : path) {
    std::vector<std::vector<I>> lists;
    if (!has_bestedges_[z(child)]) {
      for (I leaf : leaves(child)) {
        std::vector<I> list;
        for (I p : neighbend_[z(leaf)]) list.push_back(p / 2);
        lists.push_back(std::move(list));
      }
    } else {
      lists.push_back(blossombestedges_[z(child)]);
    }
    for (const auto& list : lists) {
      for (I e : list) {
        I j = ev(e, 1);
        if (inblossom_[z(j)] == b) j = ev(e, 0);
        const I bj = inblossom_[z(j)];
        if (bj != b && label_[z(bj)] == 1 && (bestedgeto[z(bj)] == -1 || slack(e) < slack(bestedgeto[z(bj)]))) {
          bestedgeto[z(bj)] = e;
        }
      }
    }
    blossombestedges_[z(child)].clear();
    has_bestedges_[z(child)] = 0;
    bestedge_[z(child)] = -1;
  }
  auto& best = blossombestedges_[z(b)];
  best.clear();
  for (I e : bestedgeto) {
    if (e != -1) best.push_back(e);
  }
  has_bestedges_[z(b)] = 1;
  bestedge_[z(b)] = -1;
  for (I e : best) {
    if (bestedge_[z(b)] == -1 || slack(e) < slack(bestedge_[z(b)])) bestedge_[z(b)] = e;
  }
}

void BlossomMatcher::expand_blossom(I b, bool endstage) {
  const std::vector<I> childs = blossomchilds_[z(b)];
  for (I s : childs) {
    blossomparent_[z(s)] = -1;
    if (s < nv_) {
      inblossom_[z(s)] = s;
    } else if (endstage && dual_[z(s)] == 0) {
      expand_blossom(s, endstage);
    } else {
      for (I leaf : leaves(s)) inblossom_[z(leaf)] = s;
    }
  }
  if (!endstage && label_[z(b)] == 2) {
    const auto& endps = blossomendps_[z(b)];
    const I len = static_cast<I>(childs.size());
    auto at = [len](const std::vector<I>& v, I idx) { return v[z(((idx % len) + len) % len)]; };
    const I entrychild = inblossom_[z(endpoint_[z(labelend_[z(b)] ^ 1)])];
    I j = static_cast<I>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
    I jstep, endptrick;
    if (j & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    I p = labelend_[z(b)];
    while (j != 0) {
      label_[z(endpoint_[z(p ^ 1)])] = 0;
      label_[z(endpoint_[z(at(endps, j - endptrick) ^ endptrick ^ 1)])] = 0;
      assign_label(endpoint_[z(p ^ 1)], 2, p);
      allowedge_[z(at(endps, j - endptrick) / 2)] = 1;
      j += jstep;
      p = at(endps, j - endptrick) ^ endptrick;
      allowedge_[z(p / 2)] = 1;
      j += jstep;
    }
    I bv = at(childs, j);
    label_[z(endpoint_[z(p ^ 1)])] = label_[z(bv)] = 2;
    labelend_[z(endpoint_[z(p ^ 1)])] = labelend_[z(bv)] = p;
    bestedge_[z(bv)] = -1;
    j += jstep;
    while (at(childs, j) != entrychild) {
      bv = at(childs, j);
      if (label_[z(bv)] == 1) {
        j += jstep;
        continue;
      }
      I found = -1;
      for (I leaf : leaves(bv)) {
        if (label_[z(leaf)] != 0) {
          found = leaf;
          break;
        }
      }
      if (found != -1) {
        label_[z(found)] = 0;
        label_[z(endpoint_[z(mate_[z(blossombase_[z(bv)])])])] = 0;
        assign_label(found, 2, labelend_[z(found)]);
      }
      j += jstep;
    }
  }
  label_[z(b)] = labelend_[z(b)] = -1;
  blossomchilds_[z(b)].clear();
  blossomendps_[z(b)].clear();
  blossombase_[z(b)] = -1;
  blossombestedges_[z(b)].clear();
  has_bestedges_[z(b)] = 0;
  bestedge_[z(b)] = -1;
  unused_.push_back(b);
}

void BlossomMatcher::augment_blossom(I b, I v) {
  I t = v;
  while (blossomparent_[z(t)] != b) t = blossomparent_[z(t)];
  if (t >= nv_) augment_blossom(t, v);
  auto& childs = blossomchilds_[z(b)];
  auto& endps = blossomendps_[z(b)];
  const I len = static_cast<I>(childs.size());
  auto at = [len](const std::vector<I>& vec, I idx) { return vec[z(((idx % len) + len) % len)]; };
  const I i = static_cast<I>(std::find(childs.begin(), childs.end(), t) - childs.begin());
  I j = i, jstep, endptrick;
  if (i & 1) {
    j -= len;
    jstep = 1;
    endptrick = 0;
  } else {
    jstep = -1;
    endptrick = 1;
  }
  while (j != 0) {
    j += jstep;
    t = at(childs, j);
    const I p = at(endps, j - endptrick) ^ endptrick;
    if (t >= nv_) augment_blossom(t, endpoint_[z(p)]);
    j += jstep;
    t = at(childs, j);
    if (t >= nv_) augment_blossom(t, endpoint_[z(p ^ 1)]);
    mate_[z(endpoint_[z(p)])] = p ^ 1;
    mate_[z(endpoint_[z(p ^ 1)])] = p;
  }
  std::rotate(childs.begin(), childs.begin() + i, childs.end());
  std::rotate(endps.begin(), endps.begin() + i, endps.end());
  blossombase_[z(b)] = blossombase_[z(childs.front())];
}

void BlossomMatcher::augment_matching(I k) {
  const I starts[2][2] = {{ev(k, 0), 2 * k + 1}, {ev(k, 1), 2 * k}};
  for (const auto& start : starts) {
    I s = start[0], p = start[1];
    while (true) {
      const I bs = inblossom_[z(s)];
      if (bs >= nv_) augment_blossom(bs, s);
      mate_[z(s)] = p;
      if (labelend_[z(bs)] == -1) break;
      const I t = endpoint_[z(labelend_[z(bs)])];
      const I bt = inblossom_[z(t)];
      s = endpoint_[z(labelend_[z(bt)])];
      const I j = endpoint_[z(labelend_[z(bt)] ^ 1)];
      if (bt >= nv_) augment_blossom(bt, j);
      mate_[z(j)] = labelend_[z(bt)];
      p = labelend_[z(bt)] ^ 1;
    }
  }
}

std::vector<I> BlossomMatcher::run() {
  const I n = nv_;
  const I nedge = static_cast<I>(edges_.size());
  if (nedge == 0) return std::vector<I>(z(n), -1);
  std::int64_t maxweight = 0;
  for (const auto& e : edges_) {
    if (e.u >= z(n) || e.v >= z(n) || e.u == e.v) throw Error(ErrorKind::InvalidParam, "invalid matching edge");
    maxweight = std::max(maxweight, e.weight);
  }
  endpoint_.resize(z(2 * nedge));
  neighbend_.assign(z(n), {});
  for (I k = 0; k < nedge; ++k) {
    endpoint_[z(2 * k)] = ev(k, 0);
    endpoint_[z(2 * k + 1)] = ev(k, 1);
    neighbend_[z(ev(k, 0))].push_back(2 * k + 1);
    neighbend_[z(ev(k, 1))].push_back(2 * k);
  }
  mate_.assign(z(n), -1);
  label_.assign(z(2 * n), 0);
  labelend_.assign(z(2 * n), -1);
  inblossom_.resize(z(n));
  for (I i = 0; i < n; ++i) inblossom_[z(i)] = i;
  blossomparent_.assign(z(2 * n), -1);
  blossomchilds_.assign(z(2 * n), {});
  blossombase_.assign(z(2 * n), -1);
  for (I i = 0; i < n; ++i) blossombase_[z(i)] = i;
  blossomendps_.assign(z(2 * n), {});
  bestedge_.assign(z(2 * n), -1);
  blossombestedges_.assign(z(2 * n), {});
  has_bestedges_.assign(z(2 * n), 0);
  for (I b = n; b < 2 * n; ++b) unused_.push_back(b);
  dual_.assign(z(2 * n), 0);
  for (I i = 0; i < n; ++i) dual_[z(i)] = maxweight;
  allowedge_.assign(z(nedge), 0);

  for (I stage = 0; stage < n; ++stage) {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (I b = n; b < 2 * n; ++b) {
      blossombestedges_[z(b)].clear();
      has_bestedges_[z(b)] = 0;
    }
    std::fill(allowedge_.begin(), allowedge_.end(), 0);
    queue_.clear();
    for (I v = 0; v < n; ++v) {
      if (mate_[z(v)] == -1 && label_[z(inblossom_[z(v)])] == 0) assign_label(v, 1, -1);
    }
    bool augmented = false;
    while (true) {
      while (!queue_.empty() && !augmented) {
        const I v = queue_.back();
        queue_.pop_back();
        for (I p : neighbend_[z(v)]) {
          const I k = p / 2;
          const I w = endpoint_[z(p)];
          if (inblossom_[z(v)] == inblossom_[z(w)]) continue;
          std::int64_t kslack = 0;
          if (!allowedge_[z(k)]) {
            kslack = slack(k);
            if (kslack <= 0) allowedge_[z(k)] = 1;
          }
          if (allowedge_[z(k)]) {
            if (label_[z(inblossom_[z(w)])] == 0) {
              assign_label(w, 2, p ^ 1);
            } else if (label_[z(inblossom_[z(w)])] == 1) {
              const I base = scan_blossom(v, w);
              if (base >= 0) {
                add_blossom(base, k);
              } else {
                augment_matching(k);
                augmented = true;
                break;
              }
            } else if (label_[z(w)] == 0) {
              label_[z(w)] = 2;
              labelend_[z(w)] = p ^ 1;
            }
          } else if (label_[z(inblossom_[z(w)])] == 1) {
            const I b = inblossom_[z(v)];
            if (bestedge_[z(b)] == -1 || kslack < slack(bestedge_[z(b)])) bestedge_[z(b)] = k;
          } else if (label_[z(w)] == 0) {
            if (bestedge_[z(w)] == -1 || kslack < slack(bestedge_[z(w)])) bestedge_[z(w)] = k;
          }
        }
      }
      if (augmented) break;

      int deltatype = -1;
      std::int64_t delta = 0;
      I deltaedge = -1, deltablossom = -1;
      if (!maxcard_) {
        deltatype = 1;
        delta = *std::min_element(dual_.begin(), dual_.begin() + n);
      }
      for (I v = 0; v < n; ++v) {
        if (label_[z(inblossom_[z(v)])] == 0 && bestedge_[z(v)] != -1) {
          const std::int64_t d = slack(bestedge_[z(v)]);
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge_[z(v)];
          }
        }
      }
      for (I b = 0; b < 2 * n; ++b) {
        if (blossomparent_[z(b)] == -1 && label_[z(b)] == 1 && bestedge_[z(b)] != -1) {
          const std::int64_t d = slack(bestedge_[z(b)]) / 2;
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge_[z(b)];
          }
        }
      }
      for (I b = n; b < 2 * n; ++b) {
        if (blossombase_[z(b)] >= 0 && blossomparent_[z(b)] == -1 && label_[z(b)] == 2 &&
            (deltatype == -1 || dual_[z(b)] < delta)) {
          delta = dual_[z(b)];
          deltatype = 4;
          deltablossom = b;
        }
      }
      if (deltatype == -1) {
        deltatype = 1;
        delta = std::max<std::int64_t>(0, *std::min_element(dual_.begin(), dual_.begin() + n));
      }
      for (I v = 0; v < n; ++v) {
        const I lb = label_[z(inblossom_[z(v)])];
        if (lb == 1) dual_[z(v)] -= delta;
        else if (lb == 2) dual_[z(v)] += delta;
      }
      for (I b = n; b < 2 * n; ++b) {
        if (blossombase_[z(b)] >= 0 && blossomparent_[z(b)] == -1) {
          if (label_[z(b)] == 1) dual_[z(b)] += delta;
          else if (label_[z(b)] == 2) dual_[z(b)] -= delta;
        }
      }
      if (deltatype == 1) {
        break;
      } else if (deltatype == 2) {
        allowedge_[z(deltaedge)] = 1;
        I i = ev(deltaedge, 0);
        if (label_[z(inblossom_[z(i)])] == 0) i = ev(deltaedge, 1);
        queue_.push_back(i);
      } else if (deltatype == 3) {
        allowedge_[z(deltaedge)] = 1;
        queue_.push_back(ev(deltaedge, 0));
      } else {
        expand_blossom(deltablossom, false);
      }
    }
    if (!augmented) break;
    for (I b = n; b < 2 * n; ++b) {
      if (blossomparent_[z(b)] == -1 && blossombase_[z(b)] >= 0 && label_[z(b)] == 1 && dual_[z(b)] == 0) {
        expand_blossom(b, true);
      }
    }
  }
  std::vector<I> out(z(n), -1);
  for (I v = 0; v < n; ++v) {
    if (mate_[z(v)] >= 0) out[z(v)] = endpoint_[z(mate_[z(v)])];
  }
  return out;
}

}  // namespace

std::vector<std::ptrdiff_t> max_weight_matching(std::size_t vertex_count, const std::vector<WeightedEdge>& edges,
                                                bool max_cardinality) {
  // Doubling every weight keeps all dual variables integral.
  std::vector<WeightedEdge> doubled = edges;
  for (auto& e : doubled) e.weight *= 2;
  return BlossomMatcher(vertex_count, doubled, max_cardinality).run();
}

std::vector<std::size_t> min_weight_perfect_matching(const Matrix& distances) {
  const Index n = distances.rows();
  if (distances.cols() != n) throw Error(ErrorKind::DimensionError, "distance matrix must be square");
  if (n % 2 != 0) throw Error(ErrorKind::SizeError, "perfect matching needs an even number of points");
  if (!distances.allFinite()) throw Error(ErrorKind::InvalidCost, "distances must be finite");
  if (n == 0) return {};
  const double top = std::max(distances.cwiseAbs().maxCoeff(), 1e-300);
  const double scale = std::ldexp(1.0, 30) / top;
  const std::int64_t ceiling = std::int64_t{1} << 31;
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const auto q = static_cast<std::int64_t>(std::llround(distances(i, j) * scale));
      edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), ceiling - q});
    }
  }
  const auto mate = max_weight_matching(static_cast<std::size_t>(n), edges, true);
  std::vector<std::size_t> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (mate[static_cast<std::size_t>(i)] < 0) throw Error(ErrorKind::ConvergenceError, "matching is not perfect");
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(mate[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace hwd
