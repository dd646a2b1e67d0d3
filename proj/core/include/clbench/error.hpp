#pragma once

#include <stdexcept>
#include <string>

namespace clbench {

enum class errc {
  invalid_coordinate,
  invalid_resolution,
  empty_region,
  bad_magic,
  unsupported_version,
  truncated_payload,
  checksum_mismatch,
  dimension_mismatch,
  invariant_violation,
  io_failure,
  degenerate_channel,
  channel_mismatch,
  empty_split,
  overlapping_ranges,
  missing_variable,
  empty_result,
  empty_lead_range,
  insufficient_history,
  insufficient_samples,
  source_too_small,
  pad_too_small,
  singular_system,
  misaligned_predictions,
  rollout_incompatible,
  bad_config,
  undefined_metric,
};

const char* errc_name(errc c);

/// Library error carrying a machine-checkable category plus a message that
/// names the offending field or file.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_coordinate: return "invalid-coordinate";
    case errc::invalid_resolution: return "invalid-resolution";
    case errc::empty_region: return "empty-region";
    case errc::bad_magic: return "bad-magic";
    case errc::unsupported_version: return "unsupported-version";
    case errc::truncated_payload: return "truncated-payload";
    case errc::checksum_mismatch: return "checksum-mismatch";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::invariant_violation: return "invariant-violation";
    case errc::io_failure: return "io-failure";
    case errc::degenerate_channel: return "degenerate-channel";
    case errc::channel_mismatch: return "channel-mismatch";
    case errc::empty_split: return "empty-split";
    case errc::overlapping_ranges: return "overlapping-ranges";
    case errc::missing_variable: return "missing-variable";
    case errc::empty_result: return "empty-result";
    case errc::empty_lead_range: return "empty-lead-range";
    case errc::insufficient_history: return "insufficient-history";
    case errc::insufficient_samples: return "insufficient-samples";
    case errc::source_too_small: return "source-too-small";
    case errc::pad_too_small: return "pad-too-small";
    case errc::singular_system: return "singular-system";
    case errc::misaligned_predictions: return "misaligned-predictions";
    case errc::rollout_incompatible: return "rollout-incompatible";
    case errc::bad_config: return "bad-config";
    case errc::undefined_metric: return "undefined-metric";
  }
  return "error";
}

}  // namespace clbench
