#pragma once

#include <chrono>
#include <mutex>

namespace payattr {

/// Thread-safe token bucket: capacity `burst`, refilled at `rate` tokens
/// per second. A non-positive rate disables limiting.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  TokenBucket(double rate, double burst);

  /// Takes a token if one is available.
  bool try_acquire();
  /// Blocks until a token is available, then takes it.
  void acquire();
  /// Time until the next token is available (zero if one is).
  Clock::duration wait_time();

  double rate() const { return rate_; }
  double burst() const { return burst_; }

 private:
  void refill(Clock::time_point now);

  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

}  // namespace payattr
