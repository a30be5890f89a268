#include "payattr/rate_limiter.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace payattr {

TokenBucket::TokenBucket(double rate, double burst)
    : rate_(rate), burst_(burst), tokens_(burst), last_(Clock::now()) {
  if (rate_ > 0.0 && burst_ < 1.0) throw std::invalid_argument("token bucket burst must be at least 1");
}

void TokenBucket::refill(Clock::time_point now) {
  const double elapsed = std::chrono::duration<double>(now - last_).count();
  tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
  last_ = now;
}

bool TokenBucket::try_acquire() {
  if (rate_ <= 0.0) return true;
  std::lock_guard lock(mutex_);
  refill(Clock::now());
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

TokenBucket::Clock::duration TokenBucket::wait_time() {
  if (rate_ <= 0.0) return Clock::duration::zero();
  std::lock_guard lock(mutex_);
  refill(Clock::now());
  if (tokens_ >= 1.0) return Clock::duration::zero();
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>((1.0 - tokens_) / rate_));
}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  // Reserve the token immediately (the balance may go negative) so that
  // concurrent waiters queue up instead of racing for the same refill.
  Clock::time_point ready;
  {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    refill(now);
    tokens_ -= 1.0;
    if (tokens_ >= 0.0) return;
    ready = now + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(-tokens_ / rate_));
  }
  std::this_thread::sleep_until(ready);
}

}  // namespace payattr
