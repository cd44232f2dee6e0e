#pragma once

#include <stdexcept>
#include <string>

namespace vo2snn {

enum class Errc {
  invalid_level,
  bad_config,
  non_finite_state,
  window_too_short,
  empty_run,
  no_oscillating_band,
  shape_mismatch,
  diverged_loss,
  bad_magic,
  truncated_file,
  dimension_mismatch,
  label_out_of_range,
  empty_data,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace vo2snn
