#ifndef QVERT_ENUMERATE_HPP
#define QVERT_ENUMERATE_HPP

/*
 * Enumeration of all admissible vertices of the projective solution space by
 * depth-first traversal of the 4-ary type tree.
 *
 * A child node is recursed into iff it passes, in order:
 *   (a) the zero test       - only the all-zeros leaf can fail it,
 *   (b) the domination test - its zero-completion must not dominate any
 *                             previously emitted type vector,
 *   (c) the feasibility test - the incrementally constrained LP stays
 *                             feasible (see tableau.hpp).
 * Every leaf that survives all three tests is an admissible vertex; it is
 * inserted into the domination store, reconstructed exactly, cross-checked
 * against the LP witness and handed to the sink.
 *
 * Parallel runs keep the sequencing guarantee the domination test relies on:
 * at every node the child-0 subtree completes before children 1, 2 and 3
 * start; those three may then run concurrently.  Any two concurrently
 * running subtrees split at a common ancestor into children with different
 * non-zero symbols, and vectors differing at a position where both are
 * non-zero never dominate one another - so the emitted set, the visited set
 * and all counters are independent of thread timing.
 */

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "qvert/arith.hpp"
#include "qvert/problem.hpp"
#include "qvert/tableau.hpp"
#include "qvert/trie.hpp"
#include "qvert/typevec.hpp"
#include "qvert/vertex.hpp"

namespace qvert {

enum class ArithMode { kAuto, kWide, kBig };

inline const char* to_string(ArithMode m) {
  switch (m) {
    case ArithMode::kAuto: return "auto";
    case ArithMode::kWide: return "wide";
    case ArithMode::kBig: return "big";
  }
  return "auto";
}

enum class SinkAction { kContinue, kStop };

using SolutionSink = std::function<SinkAction(const VertexSolution&)>;

/// Exact traversal progress: a pruned or completed child at depth d accounts
/// for 4^(n-d) of the 4^n leaf slots, so `resolved` grows monotonically from
/// 0 to `total` with no rounding anywhere.
struct Progress {
  BigInt resolved;
  BigInt total;
  double fraction() const {
    if (total == 0) return 1.0;
    return static_cast<double>(BigRational(resolved, total));
  }
  bool complete() const { return resolved == total; }
};

enum class NodeEvent { kEnter, kExit, kEmit };

/// Test instrumentation: called with the decided-symbol path of every node
/// that enters the traversal (and of every emitted leaf).  Calls are
/// serialized; the call order is the observable event order.
struct TraversalHooks {
  std::function<void(std::string_view, NodeEvent)> on_node;
};

struct EnumerateOptions {
  ArithMode arith = ArithMode::kAuto;
  bool check_invariants = false;  ///< verify tableau invariants on every pivot
  std::uint64_t progress_interval = 4096;  ///< visited nodes between callbacks
  std::function<void(const Progress&)> on_progress;
  TraversalHooks hooks;
};

struct TraversalStats {
  std::uint64_t nodes_visited = 0;  ///< root + children passing all tests
  std::uint64_t dead_ends = 0;      ///< visited nodes with no solution below
  std::uint64_t solutions = 0;
  std::uint64_t pivots = 0;
  BigInt max_tableau_entry;  ///< largest |entry| seen in any tableau
  BigInt delta;              ///< determinant bound of the reduced system
  BigInt coordinate_bound;   ///< a-priori bound on solution coordinates
  Eigen::Index rank = 0;
  Progress progress;
  double elapsed_ms = 0.0;
  bool aborted = false;  ///< the sink stopped the traversal early
  ArithMode arith_used = ArithMode::kWide;
};

namespace detail {

inline std::string path_string(const std::vector<Symbol>& path) {
  std::string out;
  out.reserve(path.size());
  for (Symbol s : path) out.push_back(static_cast<char>('0' + s));
  return out;
}

template <typename Scalar>
class Traversal {
 public:
  Traversal(const ProblemInstance& inst, const ReducedSystem& sys,
            const SolutionSink& sink, const EnumerateOptions& opts,
            unsigned workers)
      : inst_(inst),
        sys_(sys),
        sink_(sink),
        opts_(opts),
        n_(inst.tets),
        trie_(static_cast<std::size_t>(inst.tets)),
        spare_threads_(workers > 0 ? static_cast<int>(workers) - 1 : 0) {
    checks_.verify_invariants = opts.check_invariants;
    checks_.track_bases = opts.check_invariants;
    pow4_.resize(static_cast<std::size_t>(n_) + 1);
    pow4_[0] = 1;
    for (std::size_t i = 1; i < pow4_.size(); ++i) pow4_[i] = pow4_[i - 1] * 4;
    progress_total_ = pow4_[static_cast<std::size_t>(n_)];
  }

  TraversalStats run() {
    const auto t0 = std::chrono::steady_clock::now();
    auto root = initial_tableau<Scalar>(sys_, &checks_);
    fold_max_entry(root.max_entry_seen());
    notify_progress();
    process(0, {}, std::move(root), true);
    notify_progress();

    TraversalStats stats;
    stats.nodes_visited = nodes_.load();
    stats.dead_ends = dead_ends_.load();
    stats.solutions = solutions_.load();
    stats.pivots = checks_.pivots.load();
    stats.aborted = aborted_.load();
    {
      std::lock_guard lock(max_mutex_);
      stats.max_tableau_entry = max_entry_;
    }
    {
      std::lock_guard lock(progress_mutex_);
      stats.progress = Progress{progress_resolved_, progress_total_};
    }
    stats.delta = sys_.delta;
    stats.coordinate_bound = sys_.bound.per_coordinate;
    stats.rank = sys_.rank;
    stats.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    return stats;
  }

 private:
  struct Frame {
    Frame(Eigen::Index d, Tableau<Scalar>&& t, bool z)
        : depth(d), tableau(std::move(t)), zero_prefix(z) {}
    Eigen::Index depth;
    Tableau<Scalar> tableau;
    bool zero_prefix;
    Symbol next_child = 0;
    std::uint64_t subtree_solutions = 0;
    std::vector<std::thread> threads;
    std::array<std::uint64_t, 3> thread_counts{};
    std::array<std::exception_ptr, 3> thread_errors{};
  };

  struct ChildOutcome {
    bool pruned = true;
    std::optional<Tableau<Scalar>> tableau;
  };

  /// Runs the whole subtree of a node that already passed all three tests.
  /// `path` holds the node's decided symbols (path.size() == depth).
  /// Returns the number of solutions emitted in the subtree.
  ///
  /// Frames live in a deque so that worker threads, which hold a reference
  /// to their spawning frame, survive the container growing; a frame is
  /// popped only after all its workers are joined.
  std::uint64_t process(Eigen::Index depth, std::vector<Symbol> path,
                        Tableau<Scalar>&& tableau, bool zero_prefix) {
    std::deque<Frame> stack;
    stack.push_back(Frame(depth, std::move(tableau), zero_prefix));
    enter_node(path);
    std::uint64_t result = 0;
    std::exception_ptr error;

    while (!stack.empty()) {
      Frame& f = stack.back();
      path.resize(static_cast<std::size_t>(f.depth));
      if ((error || aborted_.load(std::memory_order_relaxed)) &&
          f.next_child <= 3) {
        f.next_child = 4;  // unwind: join workers, pop, repeat
      }

      if (f.next_child > 3) {
        for (std::size_t i = 0; i < f.threads.size(); ++i) {
          f.threads[i].join();
          if (f.thread_errors[i] && !error) error = f.thread_errors[i];
          f.subtree_solutions += f.thread_counts[i];
        }
        if (f.subtree_solutions == 0) dead_ends_.fetch_add(1);
        hook(path, NodeEvent::kExit);
        const std::uint64_t sols = f.subtree_solutions;
        stack.pop_back();
        if (stack.empty()) {
          result = sols;
        } else {
          stack.back().subtree_solutions += sols;
        }
        continue;
      }

      const Symbol s = f.next_child++;
      try {
        const bool child_zero_prefix = f.zero_prefix && s == 0;
        if (s != 0 && f.depth + 1 < n_ && try_reserve_thread()) {
          std::vector<Symbol> child_path(path);
          child_path.push_back(s);
          const std::size_t slot = f.threads.size();
          f.threads.emplace_back(
              [this, &f, slot, cp = std::move(child_path)]() mutable {
                try {
                  f.thread_counts[slot] =
                      resolve_child(f.tableau, f.depth, std::move(cp), false);
                } catch (...) {
                  f.thread_errors[slot] = std::current_exception();
                  aborted_.store(true);
                }
                release_thread();
              });
        } else {
          path.push_back(s);
          ChildOutcome outcome =
              resolve_child_tests(f.tableau, f.depth, path, child_zero_prefix);
          if (outcome.pruned) {
            add_progress(f.depth + 1);
          } else if (f.depth + 1 == n_) {
            f.subtree_solutions += handle_leaf(outcome, path);
            add_progress(n_);
          } else {
            stack.push_back(Frame(f.depth + 1, std::move(*outcome.tableau),
                                  child_zero_prefix));
            enter_node(path);
          }
        }
      } catch (...) {
        error = std::current_exception();
        aborted_.store(true);
      }
    }
    if (error) std::rethrow_exception(error);
    return result;
  }

  /// Applies the three tests to the child `child_path.back()` of a node at
  /// `depth`; on success the child's tableau is returned.
  ChildOutcome resolve_child_tests(const Tableau<Scalar>& parent,
                                   Eigen::Index depth,
                                   const std::vector<Symbol>& child_path,
                                   bool child_zero_prefix) {
    ChildOutcome out;
    if (child_zero_prefix &&
        static_cast<Eigen::Index>(child_path.size()) == n_) {
      return out;  // zero test: the all-zeros leaf is never admissible
    }
    std::vector<Symbol> padded(child_path);
    padded.resize(static_cast<std::size_t>(n_), 0);
    if (trie_.dominates_any(TypeVector(std::move(padded)))) {
      return out;  // domination test
    }
    auto stepped = step_down(parent, depth, child_path.back());
    fold_max_entry(stepped.tableau.max_entry_seen());
    if (!stepped.feasible()) {
      return out;  // feasibility test
    }
    out.pruned = false;
    out.tableau.emplace(std::move(stepped.tableau));
    return out;
  }

  /// Full resolution of one child subtree (tests plus traversal); the unit
  /// of work a spawned sibling thread executes.
  std::uint64_t resolve_child(const Tableau<Scalar>& parent, Eigen::Index depth,
                              std::vector<Symbol> child_path,
                              bool child_zero_prefix) {
    ChildOutcome outcome =
        resolve_child_tests(parent, depth, child_path, child_zero_prefix);
    if (outcome.pruned) {
      add_progress(depth + 1);
      return 0;
    }
    if (depth + 1 == n_) {
      const std::uint64_t emitted = handle_leaf(outcome, child_path);
      add_progress(n_);
      return emitted;
    }
    return process(depth + 1, std::move(child_path),
                   std::move(*outcome.tableau), child_zero_prefix);
  }

  /// A surviving leaf is an admissible vertex: store its type vector,
  /// reconstruct the vertex exactly, validate it, cross-check it against the
  /// LP witness and emit it.
  std::uint64_t handle_leaf(const ChildOutcome& outcome,
                            const std::vector<Symbol>& path) {
    enter_node(path);
    std::uint64_t emitted = 0;
    if (!aborted_.load(std::memory_order_relaxed)) {
      TypeVector tau{std::vector<Symbol>(path)};
      trie_.insert(tau);
      VertexSolution sol = reconstruct_vertex(tau, inst_);
      validate_solution(sol, inst_, sys_.bound);
      cross_check_witness(*outcome.tableau, tau, sol);
      emitted = emit(sol, path);
    }
    hook(path, NodeEvent::kExit);
    return emitted;
  }

  /// The leaf's LP basic solution, mapped back through both substitutions
  /// (x_j -> x_j + 1 on the lower-bounded set and the column scaling by
  /// divisor_lcm / divisor), must be a positive multiple of the
  /// reconstructed vertex and zero off its support.
  void cross_check_witness(const Tableau<Scalar>& leaf, const TypeVector& tau,
                           const VertexSolution& sol) const {
    const BasicSolution bs = leaf.basic_solution();
    const ConstraintSet cs = type_constraints(PartialTypeVector(tau));
    for (Eigen::Index j : cs.zero) {
      if (bs.numerators(j) != 0) {
        throw InternalError("LP witness is non-zero on a pinned coordinate");
      }
    }
    BigRational ratio = 0;
    for (Eigen::Index j : cs.lower_bounded) {
      const BigRational w =
          BigRational(bs.numerators(j) + bs.denominator, bs.denominator) *
          BigRational(sys_.divisor_lcm,
                      BigInt(sys_.divisors[static_cast<std::size_t>(j)]));
      if (w <= 0 || sol.u(j) <= 0) {
        throw InternalError("LP witness leaves the cone on the support");
      }
      const BigRational r = w / BigRational(sol.u(j));
      if (ratio == 0) {
        ratio = r;
      } else if (r != ratio) {
        throw InternalError(
            "LP witness is not a positive multiple of the vertex");
      }
    }
  }

  std::uint64_t emit(const VertexSolution& sol,
                     const std::vector<Symbol>& path) {
    std::lock_guard lock(emit_mutex_);
    if (aborted_.load(std::memory_order_relaxed)) return 0;
    hook(path, NodeEvent::kEmit);
    solutions_.fetch_add(1);
    if (sink_ && sink_(sol) == SinkAction::kStop) {
      aborted_.store(true);
    }
    return 1;
  }

  void enter_node(const std::vector<Symbol>& path) {
    const std::uint64_t count = nodes_.fetch_add(1) + 1;
    hook(path, NodeEvent::kEnter);
    if (opts_.on_progress && opts_.progress_interval > 0 &&
        count % opts_.progress_interval == 0) {
      notify_progress();
    }
  }

  void hook(const std::vector<Symbol>& path, NodeEvent ev) {
    if (!opts_.hooks.on_node) return;
    std::lock_guard lock(hook_mutex_);
    opts_.hooks.on_node(path_string(path), ev);
  }

  /// Accounts one fully resolved (pruned or traversed) child subtree whose
  /// root sits at `depth`.
  void add_progress(Eigen::Index depth) {
    std::lock_guard lock(progress_mutex_);
    progress_resolved_ += pow4_[static_cast<std::size_t>(n_ - depth)];
  }

  void notify_progress() {
    if (!opts_.on_progress) return;
    std::lock_guard lock(progress_mutex_);
    opts_.on_progress(Progress{progress_resolved_, progress_total_});
  }

  void fold_max_entry(const Scalar& v) {
    const BigInt b = to_bigint(v);
    std::lock_guard lock(max_mutex_);
    if (b > max_entry_) max_entry_ = b;
  }

  bool try_reserve_thread() {
    int cur = spare_threads_.load();
    while (cur > 0) {
      if (spare_threads_.compare_exchange_weak(cur, cur - 1)) return true;
    }
    return false;
  }

  void release_thread() { spare_threads_.fetch_add(1); }

  const ProblemInstance& inst_;
  const ReducedSystem& sys_;
  const SolutionSink& sink_;
  const EnumerateOptions& opts_;
  Eigen::Index n_;
  SolutionTrie trie_;
  TableauChecks checks_;
  std::vector<BigInt> pow4_;

  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<std::uint64_t> dead_ends_{0};
  std::atomic<std::uint64_t> solutions_{0};
  std::atomic<bool> aborted_{false};
  std::atomic<int> spare_threads_;

  std::mutex emit_mutex_;
  std::mutex hook_mutex_;
  std::mutex progress_mutex_;
  std::mutex max_mutex_;
  BigInt progress_resolved_ = 0;
  BigInt progress_total_;
  BigInt max_entry_ = 0;
};

template <typename Scalar>
TraversalStats run_traversal(const ProblemInstance& inst,
                             const ReducedSystem& sys, const SolutionSink& sink,
                             const EnumerateOptions& opts, unsigned workers) {
  Traversal<Scalar> traversal(inst, sys, sink, opts, workers);
  return traversal.run();
}

}  // namespace detail

/// Enumerates all admissible vertices with up to `workers` threads, invoking
/// the sink once per vertex as soon as it is found.  The sink may stop the
/// traversal early by returning SinkAction::kStop; the vertices emitted
/// before the stop are then a valid subset of the full answer.  The emitted
/// set and all counters except elapsed_ms are independent of `workers`.
inline TraversalStats enumerate_parallel(const ProblemInstance& inst,
                                         const SolutionSink& sink,
                                         unsigned workers,
                                         const EnumerateOptions& opts = {}) {
  const ReducedSystem sys = ReducedSystem::build(inst);
  ArithMode mode = opts.arith;
  if (mode == ArithMode::kAuto) {
    mode = sys.wide_mode_safe() ? ArithMode::kWide : ArithMode::kBig;
  } else if (mode == ArithMode::kWide && !sys.wide_mode_safe()) {
    mode = ArithMode::kBig;  // machine words cannot hold the bounds: escalate
  }
  TraversalStats stats =
      mode == ArithMode::kWide
          ? detail::run_traversal<std::int64_t>(inst, sys, sink, opts, workers)
          : detail::run_traversal<BigInt>(inst, sys, sink, opts, workers);
  stats.arith_used = mode;
  return stats;
}

/// Sequential enumeration.
inline TraversalStats enumerate(const ProblemInstance& inst,
                                const SolutionSink& sink,
                                const EnumerateOptions& opts = {}) {
  return enumerate_parallel(inst, sink, 1, opts);
}

struct EnumerationResult {
  std::vector<VertexSolution> solutions;
  TraversalStats stats;
};

/// Convenience wrapper collecting the emitted solutions.  With
/// `max_solutions` > 0 the traversal stops after that many vertices.
inline EnumerationResult enumerate_collect(const ProblemInstance& inst,
                                           const EnumerateOptions& opts = {},
                                           unsigned workers = 1,
                                           std::uint64_t max_solutions = 0) {
  EnumerationResult out;
  std::mutex m;
  const SolutionSink sink = [&](const VertexSolution& sol) {
    std::lock_guard lock(m);
    out.solutions.push_back(sol);
    if (max_solutions > 0 && out.solutions.size() >= max_solutions) {
      return SinkAction::kStop;
    }
    return SinkAction::kContinue;
  };
  out.stats = enumerate_parallel(inst, sink, workers, opts);
  return out;
}

}  // namespace qvert

#endif  // QVERT_ENUMERATE_HPP
