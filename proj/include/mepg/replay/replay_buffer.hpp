#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "mepg/common/error.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

struct Transition {
  VectorXd state;
  VectorXd action;
  double reward = 0.0;
  VectorXd next_state;
  bool terminal = false;  // genuine terminal only; time limits stay false
};

/// Column-per-transition mini-batch.
struct Batch {
  MatrixXd states;
  MatrixXd actions;
  VectorXd rewards;
  MatrixXd next_states;
  VectorXd not_terminal;  // 1 - done_terminal

  Index size() const { return rewards.size(); }
};

/// Fixed-capacity FIFO store of transitions with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(int state_dim, int action_dim, Index capacity = 1000000)
      : state_dim_(state_dim), action_dim_(action_dim), capacity_(capacity) {
    if (state_dim <= 0 || action_dim <= 0 || capacity <= 0) {
      throw ConfigError("replay buffer dims and capacity must be positive");
    }
  }

  Index size() const { return size_; }
  Index capacity() const { return capacity_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  void push(const Transition& t) {
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
        t.action.size() != action_dim_) {
      throw ConfigError("transition dims do not match replay buffer");
    }
    if (!std::isfinite(t.reward)) throw NumericError("non-finite reward");
    grow_to(cursor_ + 1);
    states_.col(cursor_) = t.state;
    actions_.col(cursor_) = t.action;
    rewards_[cursor_] = t.reward;
    next_states_.col(cursor_) = t.next_state;
    terminal_[cursor_] = t.terminal ? 1.0 : 0.0;
    cursor_ = (cursor_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
  }

  /// i-th stored transition, oldest first.
  Transition at(Index i) const {
    if (i < 0 || i >= size_) throw ConfigError("replay index out of range");
    const Index slot = physical(i);
    return {states_.col(slot), actions_.col(slot), rewards_[slot],
            next_states_.col(slot), terminal_[slot] != 0.0};
  }

  /// n draws, uniform with replacement over the stored transitions.
  Batch sample(Index n, Rng& rng) const {
    if (n <= 0) throw ConfigError("batch size must be positive");
    if (size_ < n) {
      throw NotReadyError("replay holds " + std::to_string(size_) +
                          " transitions, batch needs " + std::to_string(n));
    }
    Batch b;
    b.states.resize(state_dim_, n);
    b.actions.resize(action_dim_, n);
    b.rewards.resize(n);
    b.next_states.resize(state_dim_, n);
    b.not_terminal.resize(n);
    for (Index k = 0; k < n; ++k) {
      const Index slot = physical(Index(rng.index(std::size_t(size_))));
      b.states.col(k) = states_.col(slot);
      b.actions.col(k) = actions_.col(slot);
      b.rewards[k] = rewards_[slot];
      b.next_states.col(k) = next_states_.col(slot);
      b.not_terminal[k] = 1.0 - terminal_[slot];
    }
    return b;
  }

  /// Writes a header followed by one length-prefixed record per transition,
  /// oldest first.
  void dump(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    write_u64(out, std::uint64_t(state_dim_));
    write_u64(out, std::uint64_t(action_dim_));
    write_u64(out, std::uint64_t(capacity_));
    write_u64(out, std::uint64_t(size_));
    const std::uint32_t record_bytes =
        std::uint32_t(sizeof(double) * (2 * state_dim_ + action_dim_ + 1) + 1);
    for (Index i = 0; i < size_; ++i) {
      const Index slot = physical(i);
      out.write(reinterpret_cast<const char*>(&record_bytes), sizeof(record_bytes));
      write_doubles(out, states_.col(slot).data(), state_dim_);
      write_doubles(out, actions_.col(slot).data(), action_dim_);
      write_doubles(out, &rewards_[slot], 1);
      write_doubles(out, next_states_.col(slot).data(), state_dim_);
      const char term = terminal_[slot] != 0.0 ? 1 : 0;
      out.write(&term, 1);
    }
    if (!out) throw IoError("write failed for " + path);
  }

  static ReplayBuffer load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
      throw IoError(path + " is not a replay dump");
    }
    const auto sdim = int(read_u64(in, path));
    const auto adim = int(read_u64(in, path));
    const auto cap = Index(read_u64(in, path));
    const auto n = Index(read_u64(in, path));
    ReplayBuffer buf(sdim, adim, cap);
    const std::uint32_t expected =
        std::uint32_t(sizeof(double) * (2 * sdim + adim + 1) + 1);
    for (Index i = 0; i < n; ++i) {
      std::uint32_t len = 0;
      in.read(reinterpret_cast<char*>(&len), sizeof(len));
      if (!in || len != expected) throw IoError("corrupt record in " + path);
      Transition t{VectorXd(sdim), VectorXd(adim), 0.0, VectorXd(sdim), false};
      read_doubles(in, t.state.data(), sdim);
      read_doubles(in, t.action.data(), adim);
      read_doubles(in, &t.reward, 1);
      read_doubles(in, t.next_state.data(), sdim);
      char term = 0;
      in.read(&term, 1);
      if (!in) throw IoError("truncated replay dump " + path);
      t.terminal = term != 0;
      buf.push(t);
    }
    return buf;
  }

 private:
  static constexpr char kMagic[8] = {'M', 'E', 'P', 'G', 'R', 'B', '1', '\0'};

  Index physical(Index logical) const {
    const Index oldest = size_ < capacity_ ? 0 : cursor_;
    return (oldest + logical) % capacity_;
  }

  // Storage grows geometrically up to capacity so small runs stay small.
  void grow_to(Index needed) {
    if (states_.cols() >= needed) return;
    const Index cols = std::min(capacity_, std::max(needed, 2 * states_.cols()));
    states_.conservativeResize(state_dim_, cols);
    actions_.conservativeResize(action_dim_, cols);
    rewards_.conservativeResize(cols);
    next_states_.conservativeResize(state_dim_, cols);
    terminal_.conservativeResize(cols);
  }

  static void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  static std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw IoError("truncated replay header in " + path);
    return v;
  }
  static void write_doubles(std::ofstream& out, const double* p, Index n) {
    out.write(reinterpret_cast<const char*>(p), std::streamsize(sizeof(double) * n));
  }
  static void read_doubles(std::ifstream& in, double* p, Index n) {
    in.read(reinterpret_cast<char*>(p), std::streamsize(sizeof(double) * n));
  }

  int state_dim_;
  int action_dim_;
  Index capacity_;
  Index cursor_ = 0;
  Index size_ = 0;
  MatrixXd states_;
  MatrixXd actions_;
  VectorXd rewards_;
  MatrixXd next_states_;
  VectorXd terminal_;
};

}  // namespace mepg
