#pragma once

#include <map>
#include <string>
#include <vector>

#include "autonoc/errors.hpp"

namespace autonoc::retriever {

struct Chunk {
    std::string doc_id;
    std::string heading;
    std::string body;
    std::map<std::string, int> tf; // lowercased alphanumeric token counts
};

struct Index {
    std::vector<Chunk> chunks;        // corpus order: doc order, then position
    std::map<std::string, int> df;    // chunks containing each token
    int chunk_count() const { return static_cast<int>(chunks.size()); }
};

struct Doc {
    std::string id;
    std::string text;
};

std::vector<std::string> tokenize(const std::string& text);

// Splits each doc at markdown heading lines ('#' prefix); drops empty bodies.
Index ingest_corpus(const std::vector<Doc>& docs);

// Ingests every regular file in the directory, doc_id = filename, sorted.
Index ingest_directory(const std::string& path);

struct Result {
    Chunk chunk;
    double score = 0.0;
};

// tf-idf ranking: score = sum over query tokens t of tf(t, chunk) * ln(1 + N/df(t)).
// Descending score, ties by (doc_id, position); zero scores excluded.
std::vector<Result> retrieve(const Index& index, const std::string& query, int k);

} // namespace autonoc::retriever
