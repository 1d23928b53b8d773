#include "bpmatch/oracle.hpp"

#include "bpmatch/error.hpp"

#include <algorithm>
#include <numeric>

namespace bpmatch {

namespace {

class branch_and_bound {
public:
  explicit branch_and_bound(const weighted_graph& g) : g_(g), used_(g.node_count(), false)
  {
    order_.resize(g.edge_count());
    std::iota(order_.begin(), order_.end(), edge_id{0});
    std::stable_sort(order_.begin(), order_.end(), [&](edge_id a, edge_id b) {
      return g.edge_at(a).weight > g.edge_at(b).weight;
    });
  }

  oracle_result run()
  {
    visit(0);
    oracle_result r;
    r.best = matching::from_edges(g_, best_set_);
    r.best_weight = best_weight_;
    r.runner_up_weight = runner_up_;
    r.unique = !runner_up_ || *runner_up_ < best_weight_;
    return r;
  }

private:
  // Weight still obtainable from edges order_[i..] whose endpoints are free.
  rational optimistic_remainder(std::size_t i) const
  {
    rational sum;
    for (; i < order_.size(); ++i) {
      const edge& e = g_.edge_at(order_[i]);
      if (!used_[e.u] && !used_[e.v])
        sum += e.weight;
    }
    return sum;
  }

  bool prunable(std::size_t i) const
  {
    if (!found_ || !runner_up_)
      return false;
    rational bound = current_weight_ + optimistic_remainder(i);
    // A subtree can still matter if it may tie the optimum (lexicographic
    // tie-break) or beat the runner-up.
    if (bound < *runner_up_)
      return true;
    return bound == *runner_up_ && *runner_up_ < best_weight_;
  }

  void record_leaf()
  {
    std::vector<edge_id> sorted = current_;
    std::sort(sorted.begin(), sorted.end());
    if (!found_) {
      found_ = true;
      best_weight_ = current_weight_;
      best_set_ = std::move(sorted);
      return;
    }
    if (current_weight_ > best_weight_) {
      runner_up_ = best_weight_;
      best_weight_ = current_weight_;
      best_set_ = std::move(sorted);
    } else if (current_weight_ == best_weight_) {
      runner_up_ = best_weight_;
      if (std::lexicographical_compare(sorted.begin(), sorted.end(), best_set_.begin(),
                                       best_set_.end()))
        best_set_ = std::move(sorted);
    } else if (!runner_up_ || current_weight_ > *runner_up_) {
      runner_up_ = current_weight_;
    }
  }

  void visit(std::size_t i)
  {
    if (i == order_.size()) {
      record_leaf();
      return;
    }
    if (prunable(i))
      return;

    edge_id e = order_[i];
    const edge& ed = g_.edge_at(e);
    if (!used_[ed.u] && !used_[ed.v]) {
      used_[ed.u] = used_[ed.v] = true;
      current_.push_back(e);
      current_weight_ += ed.weight;
      visit(i + 1);
      current_weight_ -= ed.weight;
      current_.pop_back();
      used_[ed.u] = used_[ed.v] = false;
    }
    visit(i + 1);
  }

  const weighted_graph& g_;
  std::vector<edge_id> order_;
  std::vector<bool> used_;
  std::vector<edge_id> current_;
  rational current_weight_;

  bool found_ = false;
  rational best_weight_;
  std::vector<edge_id> best_set_;
  std::optional<rational> runner_up_;
};

} // namespace

oracle_result brute_force_max_matching(const weighted_graph& g, std::size_t edge_limit)
{
  if (g.edge_count() > edge_limit)
    throw size_limit_error("instance too large for exhaustive search: " +
                           std::to_string(g.edge_count()) + " edges, limit " +
                           std::to_string(edge_limit));
  return branch_and_bound(g).run();
}

bool check_a1(const weighted_graph& g, std::size_t edge_limit)
{
  return brute_force_max_matching(g, edge_limit).unique;
}

} // namespace bpmatch
