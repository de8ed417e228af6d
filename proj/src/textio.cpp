#include "rearing/core/textio.hpp"

#include <fstream>
#include <sstream>

#include "rearing/core/errors.hpp"

namespace rearing {

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out) throw DataError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw DataError("failed reading " + path.string());
    return ss.str();
}

}  // namespace rearing
