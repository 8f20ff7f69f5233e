#include "autonoc/retriever.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace autonoc::retriever {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace {

void add_chunk(Index& index, std::string doc_id, std::string heading, std::string body) {
    // Trim trailing newlines; a heading with no following text is not a chunk.
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    if (tokenize(body).empty()) return;
    Chunk chunk;
    chunk.doc_id = std::move(doc_id);
    chunk.heading = std::move(heading);
    chunk.body = std::move(body);
    for (const auto& t : tokenize(chunk.heading + " " + chunk.body)) ++chunk.tf[t];
    for (const auto& [t, n] : chunk.tf) ++index.df[t];
    index.chunks.push_back(std::move(chunk));
}

} // namespace

Index ingest_corpus(const std::vector<Doc>& docs) {
    std::set<std::string> seen;
    Index index;
    for (const auto& doc : docs) {
        if (!seen.insert(doc.id).second) throw IngestError("duplicate doc id: " + doc.id);
        std::istringstream in(doc.text);
        std::string line, heading, body;
        while (std::getline(in, line)) {
            if (line.rfind('#', 0) == 0) {
                add_chunk(index, doc.id, heading, body);
                heading = line.substr(line.find_first_not_of("# "));
                body.clear();
            } else {
                body += line;
                body += '\n';
            }
        }
        add_chunk(index, doc.id, heading, body);
    }
    return index;
}

Index ingest_directory(const std::string& path) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(path)) throw IngestError("not a directory: " + path);
    std::vector<Doc> docs;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path());
        std::ostringstream text;
        text << in.rdbuf();
        docs.push_back({entry.path().filename().string(), text.str()});
    }
    std::sort(docs.begin(), docs.end(), [](const Doc& a, const Doc& b) { return a.id < b.id; });
    return ingest_corpus(docs);
}

std::vector<Result> retrieve(const Index& index, const std::string& query, int k) {
    if (k < 1) throw InputError("k: must be >= 1");
    auto query_tokens = tokenize(query);
    const double n = index.chunk_count();

    std::vector<std::pair<double, size_t>> scored; // (score, chunk position)
    for (size_t i = 0; i < index.chunks.size(); ++i) {
        const auto& chunk = index.chunks[i];
        double score = 0.0;
        for (const auto& t : query_tokens) {
            auto tf_it = chunk.tf.find(t);
            if (tf_it == chunk.tf.end()) continue;
            score += tf_it->second * std::log(1.0 + n / index.df.at(t));
        }
        if (score > 0.0) scored.emplace_back(score, i);
    }
    std::stable_sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        const auto& ca = index.chunks[a.second];
        const auto& cb = index.chunks[b.second];
        if (ca.doc_id != cb.doc_id) return ca.doc_id < cb.doc_id;
        return a.second < b.second;
    });
    if (static_cast<int>(scored.size()) > k) scored.resize(k);

    std::vector<Result> results;
    for (const auto& [score, i] : scored) results.push_back({index.chunks[i], score});
    return results;
}

} // namespace autonoc::retriever
