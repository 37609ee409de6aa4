#pragma once

#include <filesystem>
#include <string>

namespace efc {
std::string read_text_file(const std::filesystem::path& path);
}
