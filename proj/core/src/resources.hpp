#pragma once

#include <map>
#include <string>

namespace req2ltl::resources {

// Generated at build time from core/resources.
const std::map<std::string, std::string>& embedded_files();

}  // namespace req2ltl::resources
