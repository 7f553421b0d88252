#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

namespace sgimd {

/// Static k-d tree over Dim-dimensional points with exact k-nearest and
/// fixed-radius queries. Results are (squared distance, id) pairs ordered by
/// distance, ties broken by id, which makes them identical to an exhaustive scan.
template <std::size_t Dim>
class KdTree {
 public:
  using Point = std::array<double, Dim>;
  using Hit = std::pair<double, std::size_t>;

  KdTree() = default;

  void build(std::vector<Point> points, std::vector<std::size_t> ids) {
    points_ = std::move(points);
    ids_ = std::move(ids);
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.clear();
    if (!points_.empty()) build_node(0, points_.size());
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  std::vector<Hit> nearest(const Point& q, std::size_t k) const {
    std::vector<Hit> out;
    if (k == 0 || nodes_.empty()) return out;
    std::priority_queue<Hit> heap;  // max-heap on (distance, id)
    search_knn(0, q, k, heap);
    out.resize(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
      out[i] = heap.top();
      heap.pop();
    }
    return out;
  }

  /// Points at distance strictly below `radius`.
  std::vector<Hit> within(const Point& q, double radius) const {
    std::vector<Hit> out;
    if (nodes_.empty() || !(radius > 0.0)) return out;
    search_radius(0, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  static double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return s;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t dim = 0;
    double split = 0.0;
    std::size_t left = 0;  // child node indices; 0 marks a leaf (root is never a child)
    std::size_t right = 0;
  };

  std::size_t build_node(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end, 0, 0.0, 0, 0});
    if (end - begin <= kLeafSize) return id;

    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < Dim; ++d) {
      double lo = points_[order_[begin]][d];
      double hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = points_[order_[i]][d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = d;
      }
    }
    if (best_spread <= 0.0) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][best_dim] < points_[b][best_dim]; });
    const double split = points_[order_[mid]][best_dim];
    const std::size_t left = build_node(begin, mid);
    const std::size_t right = build_node(mid, end);
    Node& n = nodes_[id];
    n.dim = best_dim;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
  }

  void search_knn(std::size_t node, const Point& q, std::size_t k, std::priority_queue<Hit>& heap) const {
    const Node& n = nodes_[node];
    if (n.left == 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t p = order_[i];
        const Hit h{squared_distance(points_[p], q), ids_[p]};
        if (heap.size() < k) {
          heap.push(h);
        } else if (h < heap.top()) {
          heap.pop();
          heap.push(h);
        }
      }
      return;
    }
    const double diff = q[n.dim] - n.split;
    const std::size_t near = diff < 0.0 ? n.left : n.right;
    const std::size_t far = diff < 0.0 ? n.right : n.left;
    search_knn(near, q, k, heap);
    if (heap.size() < k || diff * diff <= heap.top().first) search_knn(far, q, k, heap);
  }

  void search_radius(std::size_t node, const Point& q, double r2, std::vector<Hit>& out) const {
    const Node& n = nodes_[node];
    if (n.left == 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t p = order_[i];
        const double d2 = squared_distance(points_[p], q);
        if (d2 < r2) out.emplace_back(d2, ids_[p]);
      }
      return;
    }
    const double diff = q[n.dim] - n.split;
    const std::size_t near = diff < 0.0 ? n.left : n.right;
    const std::size_t far = diff < 0.0 ? n.right : n.left;
    search_radius(near, q, r2, out);
    if (diff * diff < r2) search_radius(far, q, r2, out);
  }

  std::vector<Point> points_;
  std::vector<std::size_t> ids_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace sgimd
