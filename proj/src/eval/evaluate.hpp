#pragma once

#include <nlohmann/json.hpp>

namespace mempal {

// The `eval` operation. Two request forms:
//   {"annotations": [...], "denominators"?: {mempal, visual, all}}
//     -> {"accuracy": [...], "report": "..."}
//   {"scenario": path, "profile"?: "reported" | "all_correct" | "replay",
//    "experiments"?: 100, "seed"?: n, "participants"?: n}
//     -> the scenario's replay summary plus "monte_carlo" and "report".
// "replay" draws answers at the rates the replay itself produced.
nlohmann::json evaluate(const nlohmann::json& request);

}  // namespace mempal
