#pragma once

// HTTP front end. Evaluations answer synchronously; optimizations and audits
// are queued as jobs on a fixed worker pool and polled via GET /jobs/{id}.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "t20/engine.hpp"
#include "t20/profile_store.hpp"

namespace t20 {

struct ServiceConfig {
    unsigned workers = 2;
    /// Queued-but-not-started jobs beyond this are refused with 503.
    std::size_t max_pending = 64;
    std::optional<ProfileStore> store;
    /// Directory "scenario_file" request fields resolve against.
    std::filesystem::path fixtures;
    SimOptions sim;
};

class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listener; port 0 picks a free port. Returns the bound port,
    /// or -1 on failure.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called. Requires a successful bind().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace t20
