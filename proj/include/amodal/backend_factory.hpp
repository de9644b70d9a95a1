#pragma once

#include "amodal/backends.hpp"
#include "amodal/config.hpp"
#include "amodal/pipeline.hpp"

namespace amodal {

// Builds the backend registry named by the config. Per-role kind under
// [backends.<role>] falls back to the shared [backends] kind:
//   http     - live endpoints (chat-completions for chat, the JSON model
//              protocol for the rest)
//   scripted - chat only, consumable script file
//   oracle   - ground-truth doubles loaded from backends.oracle_samples
//   none     - leave the role unbound (classifier only)
BackendRegistry make_backends(const Config& config, const PipelineConfig& pipeline_config);

}  // namespace amodal
