#include "hpmetric/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>

#include "hpmetric/errors.hpp"

namespace hpm {

namespace {

constexpr std::size_t kMemberLabel = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kMaxReportedViolations = 20;

std::vector<char> membership(std::size_t n, std::span<const std::size_t> members) {
  std::vector<char> is_member(n, 0);
  for (auto m : members) {
    if (m >= n) throw DomainError("class member " + std::to_string(m) + " out of range");
    is_member[m] = 1;
  }
  return is_member;
}

// Members reachable from `start` along walks whose intermediate states avoid the class.
std::vector<std::size_t> first_members_reached(const Adjacency& adj, const std::vector<char>& is_member,
                                               std::size_t start) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> found;
  std::deque<std::size_t> frontier{start};
  while (!frontier.empty()) {
    const auto v = frontier.front();
    frontier.pop_front();
    for (auto w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      if (is_member[w]) {
        found.push_back(w);
      } else {
        frontier.push_back(w);
      }
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace

OrderedClass order_class(const TransitionMatrix& p, std::span<const std::size_t> members) {
  if (members.empty()) throw DomainError("empty equivalence class");
  std::vector<std::size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("equivalence class lists a state twice");
  }
  OrderedClass out;
  if (sorted.size() == 1) {
    out.members = sorted;
    return out;
  }
  const auto adj = support_graph(p.matrix());
  const auto is_member = membership(p.size(), sorted);
  std::vector<char> placed(p.size(), 0);
  std::size_t current = sorted.front();
  out.members.push_back(current);
  placed[current] = 1;
  for (std::size_t step = 0; step < sorted.size(); ++step) {
    const auto next = first_members_reached(adj, is_member, current);
    if (next.size() != 1) {
      throw StructureError("class member " + p.labels()[current] + " has " + std::to_string(next.size()) +
                           " first-reachable members instead of one; not a true degenerate class");
    }
    current = next.front();
    if (step + 1 == sorted.size()) break;
    if (placed[current]) {
      throw StructureError("commute order returns to " + p.labels()[current] + " before visiting every member");
    }
    placed[current] = 1;
    out.members.push_back(current);
  }
  if (current != out.members.front()) {
    throw StructureError("commute order over the class does not close into a cycle");
  }
  return out;
}

SegmentLabeling segments(const TransitionMatrix& p, const OrderedClass& cls, std::size_t class_id) {
  const auto n = p.size();
  SegmentLabeling out;
  out.class_id = class_id;
  out.segment.assign(n, std::nullopt);
  if (cls.members.size() < 2) {
    // a singleton class induces no segmentation; everyone else shares segment 0
    const auto is_member = membership(n, cls.members);
    for (std::size_t v = 0; v < n; ++v) {
      if (!is_member[v]) out.segment[v] = 0;
    }
    return out;
  }
  const auto rev = reverse(support_graph(p.matrix()));
  const auto is_member = membership(n, cls.members);
  for (std::size_t k = 0; k < cls.members.size(); ++k) {
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> frontier{cls.members[k]};
    while (!frontier.empty()) {
      const auto v = frontier.front();
      frontier.pop_front();
      for (auto u : rev[v]) {
        if (is_member[u] || seen[u]) continue;
        seen[u] = 1;
        if (out.segment[u] && *out.segment[u] != k) {
          throw StructureError("node " + p.labels()[u] + " reaches two class members first (" +
                               p.labels()[cls.members[*out.segment[u]]] + ", " + p.labels()[cls.members[k]] + ")");
        }
        out.segment[u] = k;
        frontier.push_back(u);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_member[v] && !out.segment[v]) {
      throw StructureError("node " + p.labels()[v] + " cannot reach the class");
    }
  }
  return out;
}

std::vector<std::size_t> absolute_segments(std::size_t n, const std::vector<SegmentLabeling>& labelings) {
  std::map<std::vector<std::size_t>, std::size_t> ids;
  std::vector<std::size_t> out(n);
  std::vector<std::size_t> key(labelings.size());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t l = 0; l < labelings.size(); ++l) {
      key[l] = labelings[l].segment[v].value_or(kMemberLabel);
    }
    const auto [it, inserted] = ids.emplace(key, ids.size());
    out[v] = it->second;
  }
  return out;
}

QuotientChain quotient_chain(const TransitionMatrix& p, const Vector& phi,
                             const std::vector<std::vector<std::size_t>>& partition) {
  const auto n = p.size();
  if (static_cast<std::size_t>(phi.size()) != n) throw DomainError("phi size does not match the chain");
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<char> covered(n, 0);
  for (const auto& block : partition) {
    if (block.empty()) throw DomainError("partition contains an empty class");
    auto sorted = block;
    std::sort(sorted.begin(), sorted.end());
    for (auto v : sorted) {
      if (v >= n) throw DomainError("partition member out of range");
      if (covered[v]) throw DomainError("partition classes overlap at state " + p.labels()[v]);
      covered[v] = 1;
    }
    blocks.push_back(std::move(sorted));
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!covered[v]) throw DomainError("partition does not cover state " + p.labels()[v]);
  }
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });

  const auto m = static_cast<Eigen::Index>(blocks.size());
  std::vector<std::size_t> class_map(n);
  std::vector<std::string> labels(blocks.size());
  for (std::size_t u = 0; u < blocks.size(); ++u) {
    for (auto v : blocks[u]) {
      class_map[v] = u;
      if (!labels[u].empty()) labels[u] += '+';
      labels[u] += p.labels()[v];
    }
  }

  Matrix pq = Matrix::Zero(m, m);
  Vector phi_q = Vector::Zero(m);
  const auto& pm = p.matrix();
  for (std::size_t u = 0; u < blocks.size(); ++u) {
    const auto U = static_cast<Eigen::Index>(u);
    for (auto i : blocks[u]) phi_q(U) += phi(static_cast<Eigen::Index>(i));
    for (auto i : blocks[u]) {
      const double weight = phi(static_cast<Eigen::Index>(i)) / phi_q(U);
      for (std::size_t j = 0; j < n; ++j) {
        const double pij = pm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (pij != 0.0) pq(U, static_cast<Eigen::Index>(class_map[j])) += weight * pij;
      }
    }
  }
  // a merged row can round to just above 1
  pq = pq.cwiseMin(1.0);
  return QuotientChain{TransitionMatrix(std::move(pq), std::move(labels)), std::move(blocks), std::move(class_map),
                       std::move(phi_q)};
}

QuotientChain collapse_sequentially(const TransitionMatrix& p, const Vector& phi,
                                    const std::vector<std::vector<std::size_t>>& classes) {
  const auto n = p.size();
  std::vector<std::vector<std::size_t>> singletons(n);
  for (std::size_t v = 0; v < n; ++v) singletons[v] = {v};
  QuotientChain current = quotient_chain(p, phi, singletons);

  for (const auto& cls : classes) {
    std::vector<char> in_block(current.p.size(), 0);
    for (auto v : cls) {
      if (v >= n) throw DomainError("class member out of range");
      in_block[current.class_map[v]] = 1;
    }
    std::vector<std::vector<std::size_t>> partition;
    std::vector<std::size_t> merged;
    for (std::size_t s = 0; s < current.p.size(); ++s) {
      if (in_block[s]) {
        merged.push_back(s);
      } else {
        partition.push_back({s});
      }
    }
    partition.push_back(std::move(merged));
    auto next = quotient_chain(current.p, current.phi, partition);

    // translate quotient states back to original nodes
    std::vector<std::vector<std::size_t>> originals(next.classes.size());
    std::vector<std::size_t> class_map(n);
    for (std::size_t u = 0; u < next.classes.size(); ++u) {
      for (auto s : next.classes[u]) {
        originals[u].insert(originals[u].end(), current.classes[s].begin(), current.classes[s].end());
      }
      std::sort(originals[u].begin(), originals[u].end());
      for (auto v : originals[u]) class_map[v] = u;
    }
    next.classes = std::move(originals);
    next.class_map = std::move(class_map);
    current = std::move(next);
  }
  return current;
}

QuotientBoundsReport check_quotient_bounds(const HpDistance& d, const HpDistance& d_prime, const QuotientChain& quotient,
                                           const std::vector<SegmentLabeling>& labelings, double tol) {
  const auto n = d.size();
  if (quotient.class_map.size() != n) throw DomainError("quotient does not match the original chain");
  if (d_prime.size() != quotient.classes.size()) throw DomainError("quotient distance has the wrong size");
  const auto absolute = absolute_segments(n, labelings);

  QuotientBoundsReport report;
  report.min_lower_gap = std::numeric_limits<double>::infinity();
  report.min_upper_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = quotient.class_map[i];
      const auto b = quotient.class_map[j];
      if (a == b) continue;
      ++report.pairs_checked;
      const double dij = d.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double dq = d_prime.d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      QuotientBoundViolation record{i, j, dij, dq, dij, false};
      bool violated = false;
      if (absolute[i] == absolute[j]) {
        ++report.same_segment_pairs;
        record.same_absolute_segment = true;
        const double err = std::abs(dij - dq);
        report.worst_isometry_error = std::max(report.worst_isometry_error, err);
        violated = err > tol;
      } else {
        ++report.cross_segment_pairs;
        std::size_t separating = 0;
        for (const auto& l : labelings) {
          if (l.segment[i] && l.segment[j] && *l.segment[i] != *l.segment[j]) ++separating;
        }
        const double sizes = static_cast<double>(quotient.classes[a].size() * quotient.classes[b].size());
        record.upper = dij + 0.5 * std::log(sizes) + static_cast<double>(separating) * std::numbers::ln2;
        report.min_lower_gap = std::min(report.min_lower_gap, dq - dij);
        report.min_upper_gap = std::min(report.min_upper_gap, record.upper - dq);
        violated = !(dij < dq) || dq > record.upper + tol;
      }
      if (violated) {
        ++report.violation_count;
        if (report.violations.size() < kMaxReportedViolations) report.violations.push_back(record);
      }
    }
  }
  if (report.cross_segment_pairs == 0) report.min_lower_gap = report.min_upper_gap = 0.0;
  return report;
}

QuotientAnalysis analyze_quotient(const TransitionMatrix& p, double tol_deg, unsigned threads) {
  auto phi = stationary_distribution(p);
  auto q = hitting_fast(p, {.threads = threads});
  auto degeneracy = degenerate_pairs(q, phi, tol_deg);

  std::vector<OrderedClass> ordered;
  std::vector<SegmentLabeling> labelings;
  for (std::size_t c = 0; c < degeneracy.classes.size(); ++c) {
    if (degeneracy.classes[c].size() < 2) continue;
    ordered.push_back(order_class(p, degeneracy.classes[c]));
    labelings.push_back(segments(p, ordered.back(), c));
  }
  auto absolute = absolute_segments(p.size(), labelings);
  auto quotient = quotient_chain(p, phi.phi, degeneracy.classes);
  auto d = hp_distance(hp_similarity(q, phi, 0.5), tol_deg);

  const auto phi_prime = stationary_distribution(quotient.p);
  const auto q_prime = hitting_fast(quotient.p, {.threads = threads});
  auto d_prime = hp_distance(hp_similarity(q_prime, phi_prime, 0.5), tol_deg);
  auto bounds = check_quotient_bounds(d, d_prime, quotient, labelings);
  auto quotient_degeneracy = degenerate_pairs(q_prime, phi_prime, tol_deg);

  return QuotientAnalysis{std::move(phi),      std::move(q),        std::move(degeneracy),
                          std::move(ordered),  std::move(labelings), std::move(absolute),
                          std::move(quotient), std::move(d),        std::move(d_prime),
                          std::move(bounds),   std::move(quotient_degeneracy)};
}

}  // namespace hpm
