#pragma once

#include <filesystem>
#include <string>

#include "amb/mdp.hpp"

namespace amb {

// Instance files are JSON documents of the form
//
//   {"horizon": 2,
//    "levels": [["s1"], ["s2", "s3"]],
//    "rewards": {"s1": [0.0, 0.0], "s2": [0.6, 0.0], ...},
//    "transitions": {"s1": [[["s2", 1.0]], [["s3", 1.0]]], ...},
//    "initial": {"s1": 1.0}}
//
// Reward arrays fix the action count of each state. Doubles are written in
// shortest round-trip form, so save/load is lossless.

std::string mdp_to_text(const TabularMdp& mdp);
TabularMdp mdp_from_text(const std::string& text);

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);
TabularMdp load_mdp(const std::filesystem::path& path);

}  // namespace amb
