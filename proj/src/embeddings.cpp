#include <fstream>
#include <sstream>

#include <json.hpp>

#include "forgeprompt/io.hpp"

namespace forgeprompt::io {

using nlohmann::json;

regions::LandmarkSet read_landmarks(const fs::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const Error&) {
        throw Error(Errc::MalformedLandmarks, "cannot read " + path.string());
    }
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
        throw Error(Errc::MalformedLandmarks, path.string() + ": expected {\"points\": [[x,y], ...]}");
    const auto& pts = doc["points"];
    if (pts.size() != regions::LandmarkSet::kCount)
        throw Error(Errc::MalformedLandmarks,
                    path.string() + ": expected 68 points, got " + std::to_string(pts.size()));
    regions::LandmarkSet lm;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw Error(Errc::MalformedLandmarks, path.string() + ": point " + std::to_string(i) + " is not [x,y]");
        lm.points[i] = {p[0].get<double>(), p[1].get<double>()};
    }
    return lm;
}

void write_landmarks(const fs::path& path, const regions::LandmarkSet& lm) {
    json pts = json::array();
    for (const auto& p : lm.points) pts.push_back({p.x, p.y});
    write_text(path, json{{"points", pts}}.dump() + "\n");
}

std::vector<EmbeddingRecord> read_embeddings(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<EmbeddingRecord> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto where = [&] { return path.string() + ":" + std::to_string(lineno); };
        const json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) throw Error(Errc::InvalidArgument, where() + ": not a JSON object");
        EmbeddingRecord rec;
        if (row.contains("prompt_index")) {
            if (!row["prompt_index"].is_number_integer())
                throw Error(Errc::InvalidArgument, where() + ": prompt_index must be an integer");
            rec.prompt_index = row["prompt_index"].get<std::int64_t>();
        }
        if (row.contains("id")) {
            if (!row["id"].is_string()) throw Error(Errc::InvalidArgument, where() + ": id must be a string");
            rec.id = row["id"].get<std::string>();
        }
        if (!rec.prompt_index && !rec.id) throw Error(Errc::InvalidArgument, where() + ": needs prompt_index or id");
        if (!row.contains("vector") || !row["vector"].is_array() || row["vector"].empty())
            throw Error(Errc::InvalidArgument, where() + ": vector must be a non-empty array");
        for (const auto& v : row["vector"]) {
            if (!v.is_number()) throw Error(Errc::InvalidArgument, where() + ": vector entries must be numbers");
            rec.vector.push_back(v.get<double>());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

c2f::EmbeddingBatch to_batch(const std::vector<EmbeddingRecord>& rows) {
    std::vector<std::vector<double>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) m.push_back(r.vector);
    return c2f::EmbeddingBatch::from_rows(m);
}

}  // namespace forgeprompt::io
