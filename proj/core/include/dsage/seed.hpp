#pragma once

#include <string_view>

#include "dsage/kb.hpp"

namespace dsage {

// Canonical text of the bundled drought knowledge base (data/seed.dkb).
std::string_view seed_kb_text() noexcept;

// Parsed seed KB. Throws only if the bundled text is broken.
const KnowledgeBase& seed_kb();

}  // namespace dsage
