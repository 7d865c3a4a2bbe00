// Copyright 2026 The knowbal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "knowbal/validity.h"

namespace knowbal {

namespace {

constexpr const char *kFormatTag = "knowbal-catalog";

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string header_line(int n) {
    return std::string("{\"format\":\"") + kFormatTag + "\",\"version\":" +
           std::to_string(Catalog::kFormatVersion) + ",\"n_systems\":" + std::to_string(n) + "}";
}

}  // namespace

uint64_t fnv1a64(const std::string &bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string serialize_catalog(const Catalog &c) {
    std::string body = header_line(c.shape().n_systems()) + "\n";
    for (const auto &s : c.states()) {
        body += "{\"size\":" + std::to_string(s.size()) + ",\"members\":[";
        bool first = true;
        s.members().for_each([&](OnticIndex i) {
            if (!first) body += ',';
            first = false;
            body += std::to_string(i);
        });
        body += "]}\n";
    }
    return body + "{\"checksum\":\"fnv1a64:" + hex64(fnv1a64(body)) + "\"}\n";
}

Catalog parse_catalog(const std::string &text) {
    using nlohmann::json;
    using Kind = CatalogError::Kind;
    std::vector<std::string> lines;
    std::vector<size_t> offsets;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            throw CatalogError(Kind::parse, "catalog is truncated: last line has no terminator");
        }
        offsets.push_back(pos);
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (lines.size() < 2) throw CatalogError(Kind::parse, "catalog is truncated");

    auto parse_line = [&](size_t k) {
        try {
            return json::parse(lines[k]);
        } catch (const json::exception &e) {
            throw CatalogError(Kind::parse, "line " + std::to_string(k + 1) + ": " + e.what());
        }
    };

    json header = parse_line(0);
    if (!header.is_object() || header.value("format", "") != kFormatTag) {
        throw CatalogError(Kind::parse, "missing catalog header");
    }
    if (!header.contains("version") || !header["version"].is_number_integer() ||
        header["version"].get<int>() != Catalog::kFormatVersion) {
        throw CatalogError(Kind::version, "unsupported catalog version " +
                                              (header.contains("version") ? header["version"].dump()
                                                                         : std::string("<none>")));
    }
    if (!header.contains("n_systems") || !header["n_systems"].is_number_integer()) {
        throw CatalogError(Kind::parse, "header lacks n_systems");
    }
    int n = header["n_systems"].get<int>();
    if (n < 1 || n > kMaxCatalogSystems) throw CatalogError(Kind::parse, "bad n_systems");

    json trailer = parse_line(lines.size() - 1);
    if (!trailer.is_object() || !trailer.contains("checksum") || !trailer["checksum"].is_string()) {
        throw CatalogError(Kind::parse, "catalog is truncated: checksum line missing");
    }
    std::string body = text.substr(0, offsets.back());
    std::string expected = "fnv1a64:" + hex64(fnv1a64(body));
    if (trailer["checksum"].get<std::string>() != expected) {
        throw CatalogError(Kind::checksum, "catalog checksum mismatch");
    }

    SystemShape shape(n);
    std::vector<EpistemicState> states;
    for (size_t k = 1; k + 1 < lines.size(); ++k) {
        json rec = parse_line(k);
        if (!rec.is_object() || !rec.contains("size") || !rec.contains("members") ||
            !rec["members"].is_array()) {
            throw CatalogError(Kind::parse, "line " + std::to_string(k + 1) + ": bad record");
        }
        std::vector<OnticIndex> members;
        try {
            for (const auto &v : rec["members"]) members.push_back(v.get<OnticIndex>());
            if (rec["size"].get<size_t>() != members.size()) {
                throw CatalogError(Kind::parse, "line " + std::to_string(k + 1) + ": size mismatch");
            }
            states.push_back(make_state(shape, members));
        } catch (const CatalogError &) {
            throw;
        } catch (const std::exception &e) {
            throw CatalogError(Kind::parse, "line " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return Catalog(shape, std::move(states));
}

void save_catalog(const Catalog &c, const std::string &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CatalogError(CatalogError::Kind::io, "cannot open " + path + " for writing");
    out << serialize_catalog(c);
    if (!out) throw CatalogError(CatalogError::Kind::io, "write failed for " + path);
}

Catalog load_catalog(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogError(CatalogError::Kind::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_catalog(ss.str());
}

CatalogStore::CatalogStore(std::string cache_dir, bool offline)
    : cache_dir_(std::move(cache_dir)), offline_(offline) {}

std::string CatalogStore::cache_path(int n_systems) const {
    if (!cache_dir_) return {};
    return (std::filesystem::path(*cache_dir_) / ("catalog-n" + std::to_string(n_systems) + ".jsonl"))
        .string();
}

bool CatalogStore::cache_hit(int n_systems) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = hits_.find(n_systems);
    return it != hits_.end() && it->second;
}

const Catalog &CatalogStore::get(int n_systems) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = catalogs_.find(n_systems);
    if (it != catalogs_.end()) return *it->second;
    SystemShape shape(n_systems);
    std::unique_ptr<Catalog> cat;
    bool hit = false;
    if (cache_dir_) {
        std::string path = cache_path(n_systems);
        if (std::filesystem::exists(path)) {
            cat = std::make_unique<Catalog>(load_catalog(path));
            if (!(cat->shape() == shape)) throw CatalogError(CatalogError::Kind::parse, "cached catalog has wrong shape");
            hit = true;
        } else if (offline_) {
            throw CatalogError(CatalogError::Kind::io,
                               "catalog for N=" + std::to_string(n_systems) +
                                   " is not cached at " + path + " and offline mode is set");
        }
    } else if (offline_) {
        throw CatalogError(CatalogError::Kind::io, "offline mode needs a cache directory");
    }
    if (!cat) {
        cat = std::make_unique<Catalog>(enumerate_valid(shape));
        if (cache_dir_) {
            std::filesystem::create_directories(*cache_dir_);
            std::string path = cache_path(n_systems);
            std::string tmp = path + ".tmp";
            save_catalog(*cat, tmp);
            std::filesystem::rename(tmp, path);
        }
    }
    hits_[n_systems] = hit;
    return *catalogs_.emplace(n_systems, std::move(cat)).first->second;
}

}  // namespace knowbal
