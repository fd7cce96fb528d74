#pragma once

#include <stdexcept>
#include <string>

namespace spikegrad {

struct CheckError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

[[noreturn]] inline void fail_check(const std::string& what) { throw CheckError(what); }

}  // namespace spikegrad

#define SG_CHECK(cond, msg)            \
  do {                                 \
    if (!(cond)) {                     \
      ::spikegrad::fail_check((msg));  \
    }                                  \
  } while (0)
