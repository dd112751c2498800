#include "output.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace unitrig::cli {

std::filesystem::path resolve_outdir(const std::string& flag_value) {
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* env = std::getenv("UNITRIG_OUT_DIR"); env != nullptr && env[0] != '\0') {
        return env;
    }
    return ".";
}

std::filesystem::path commit_file(const std::filesystem::path& dir, const std::string& name,
                                  const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path final_path = dir / name;
    const std::filesystem::path tmp_path = dir / (name + ".tmp");
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp_path);
            throw std::runtime_error("cannot write " + tmp_path.string());
        }
    }
    std::filesystem::rename(tmp_path, final_path);
    return final_path;
}

}  // namespace unitrig::cli
