#pragma once

#include <cstdint>
#include <string>

#include "bimanip/certificate.hpp"
#include "bimanip/world.hpp"

namespace bimanip {

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& data);

// Writes via a temp file plus rename, so readers never see partial content.
void atomic_write(const std::string& path, const std::string& content);

// Loads and finalizes a scene. Unknown keys, bad versions, and malformed
// values throw std::runtime_error with file/line context.
World load_scene(const std::string& path);

// Content hash of the canonicalized (key-sorted, reserialized) scene file;
// whitespace and key order do not affect it.
std::uint64_t scene_fingerprint(const std::string& path);

void save_certificate(const Certificate& cert, const std::string& path);
Certificate load_certificate(const std::string& path);

void save_trajectory(const ManipulationTrajectory& traj, const std::string& path);
ManipulationTrajectory load_trajectory(const std::string& path);

// Replays every stored trajectory in the world and checks the spanning
// property. Returns true or the first violation.
Result<bool> validate_certificate(const World& w, const Certificate& cert);

}  // namespace bimanip
