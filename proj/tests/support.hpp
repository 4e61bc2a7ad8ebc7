// Shared helpers for the test suites: stub providers, temp dirs, RNG.
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "imgfact/embedding.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/providers.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        dir_ = std::filesystem::temp_directory_path() /
               ("imgfact_test_" + tag + "_" + std::to_string(::getpid()) +
                "_" + std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

// Embeds every text to a fixed table entry, or via a hash-derived vector
// when no table entry exists.
class StubEmbedder final : public imgfact::EmbeddingProvider {
public:
    explicit StubEmbedder(std::size_t dim = 8) : dim_(dim) {}

    void set(const std::string& text, std::vector<float> vec) {
        table_[text] = std::move(vec);
    }

    std::vector<std::vector<float>>
    embed(const std::vector<std::string>& texts) override {
        ++calls;
        std::vector<std::vector<float>> out;
        for (const auto& t : texts) {
            auto it = table_.find(t);
            if (it != table_.end()) {
                out.push_back(it->second);
                continue;
            }
            // deterministic pseudo-vector from the text
            std::vector<float> v(dim_);
            std::size_t h = std::hash<std::string>{}(t);
            std::mt19937 rng(static_cast<unsigned>(h));
            std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
            for (auto& x : v)
                x = dist(rng);
            out.push_back(std::move(v));
        }
        return out;
    }

    std::string model() const override { return "stub"; }

    int calls = 0;

private:
    std::size_t dim_;
    std::map<std::string, std::vector<float>> table_;
};

// Scripted providers for image-retrieval tests.
class FakeRis final : public imgfact::RisProvider {
public:
    std::function<std::vector<imgfact::RISResult>(const imgfact::ClaimImage&)>
        handler;
    std::vector<imgfact::RISResult>
    search(const imgfact::ClaimImage& image) override {
        ++calls;
        return handler(image);
    }
    int calls = 0;
};

class FakeScraper final : public imgfact::ScrapeProvider {
public:
    std::function<imgfact::ScrapedPage(const std::string&)> handler;
    imgfact::ScrapedPage scrape(const std::string& url) override {
        ++calls;
        return handler(url);
    }
    int calls = 0;
};

class FakeDater final : public imgfact::DateProvider {
public:
    std::map<std::string, imgfact::Date> dates;
    std::optional<imgfact::Date> estimate(const std::string& url,
                                          std::string_view) override {
        auto it = dates.find(url);
        if (it == dates.end())
            return std::nullopt;
        return it->second;
    }
};

class FakeThumbs final : public imgfact::ThumbFetcher {
public:
    std::map<std::string, imgfact::Thumb> thumbs;
    std::vector<std::string> fail_urls;
    imgfact::Thumb fetch(const std::string& url) override {
        ++calls;
        for (const auto& f : fail_urls)
            if (f == url)
                throw imgfact::ThumbFetchError("scripted failure for " + url);
        auto it = thumbs.find(url);
        if (it == thumbs.end())
            throw imgfact::ThumbFetchError("no scripted thumb for " + url);
        return it->second;
    }
    int calls = 0;
};

class FakeLlm final : public imgfact::LlmProvider {
public:
    std::function<imgfact::LlmResponse(const std::string&)> handler;
    imgfact::LlmResponse
    complete(const std::string& request_id, const std::string&,
             const std::vector<imgfact::LlmUserPart>&) override {
        ++calls;
        return handler(request_id);
    }
    int calls = 0;
};

// Retry policy that records sleeps instead of sleeping.
inline imgfact::RetryPolicy instant_retry(int attempts = 3,
                                          std::vector<int>* sleeps = nullptr) {
    imgfact::RetryPolicy p;
    p.max_attempts = attempts;
    p.base_delay_ms = 10;
    p.sleeper = [sleeps](int ms) {
        if (sleeps)
            sleeps->push_back(ms);
    };
    return p;
}

} // namespace testsupport
