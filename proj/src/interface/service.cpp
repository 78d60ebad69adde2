#include "t20/service.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "t20/error.hpp"
#include "t20/report.hpp"
#include "t20/scenario.hpp"

namespace t20 {

using json = nlohmann::json;

namespace {

struct Cancelled {};

struct HttpError {
    int status;
    json body;
};

enum class JobStatus { Queued, Running, Done, Failed };

std::string_view status_name(JobStatus s) {
    switch (s) {
        case JobStatus::Queued: return "queued";
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "unknown";
}

struct Job {
    std::string id;
    std::string kind;
    JobStatus status = JobStatus::Queued;
    JobProgress progress;
    json result;
    json error;
    std::function<json(const JobProgressFn&)> work;
};

json issues_json(const std::vector<FieldIssue>& issues) {
    json out = json::array();
    for (const auto& i : issues) out.push_back({{"field", i.field}, {"message", i.message}});
    return out;
}

// Maps library errors onto HTTP statuses: malformed input is 400 with
// per-field messages, an infeasible scenario is 422 with the constraint.
HttpError to_http(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const HttpError& e) {
        return e;
    } catch (const ValidationError& e) {
        return {400, {{"error", "validation"}, {"issues", issues_json(e.issues())}}};
    } catch (const InfeasibleError& e) {
        return {422, {{"error", "infeasible"}, {"constraint", e.constraint()}, {"message", e.what()}}};
    } catch (const FitError& e) {
        return {400, {{"error", "validation"}, {"issues", issues_json({{e.bound(), e.what()}})}}};
    } catch (const CapacityError& e) {
        return {422, {{"error", "capacity"}, {"constraint", "capacity"}, {"message", e.what()}}};
    } catch (const SchemaError& e) {
        return {400, {{"error", "schema"}, {"message", e.what()}}};
    } catch (const DomainError& e) {
        return {400, {{"error", "domain"}, {"message", e.what()}}};
    } catch (const std::exception& e) {
        return {500, {{"error", "internal"}, {"message", e.what()}}};
    }
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(dump_report(body), "application/json");
}

json parse_body(const httplib::Request& req) {
    try {
        json body = json::parse(req.body);
        if (!body.is_object()) throw ValidationError("", "request body must be a JSON object");
        return body;
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("request body is not valid JSON: ") + e.what());
    }
}

template <typename T>
T field_or(const json& body, const std::string& key, T fallback, std::vector<FieldIssue>& issues) {
    if (!body.contains(key)) return fallback;
    const json& v = body.at(key);
    if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) {
            issues.push_back({key, "must be a number"});
            return fallback;
        }
    } else {
        if (!v.is_number_unsigned()) {
            issues.push_back({key, "must be a non-negative integer"});
            return fallback;
        }
    }
    return v.get<T>();
}

}  // namespace

struct Service::Impl {
    ServiceConfig cfg;
    httplib::Server server;

    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::shared_ptr<Job>> queue;
    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::uint64_t next_id = 1;
    std::atomic<bool> stopping{false};
    std::vector<std::jthread> workers;

    explicit Impl(ServiceConfig c) : cfg(std::move(c)) {
        routes();
        const unsigned n = std::max(1u, cfg.workers);
        for (unsigned i = 0; i < n; ++i) workers.emplace_back([this] { worker_loop(); });
    }

    ~Impl() {
        stopping = true;
        cv.notify_all();
        workers.clear();
    }

    const ProfileStore* store() const { return cfg.store ? &*cfg.store : nullptr; }

    Scenario scenario_from(const json& body, std::optional<ScenarioKind> expected) {
        Scenario s;
        if (body.contains("scenario_file")) {
            if (!body.at("scenario_file").is_string()) throw ValidationError("scenario_file", "must be a string");
            if (cfg.fixtures.empty())
                throw ValidationError("scenario_file", "service was started without a fixtures directory");
            const auto rel = std::filesystem::path(body.at("scenario_file").get<std::string>()).lexically_normal();
            if (rel.is_absolute() || rel.empty() || *rel.begin() == "..")
                throw ValidationError("scenario_file", "must be a path inside the fixtures directory");
            s = load_scenario_file(cfg.fixtures / rel, store());
        } else if (body.contains("scenario")) {
            try {
                s = load_scenario(body.at("scenario"), ScenarioContext{store(), cfg.fixtures});
            } catch (const ValidationError& e) {
                std::vector<FieldIssue> issues;
                for (const auto& i : e.issues())
                    issues.push_back({i.field.empty() ? "scenario" : "scenario." + i.field, i.message});
                throw ValidationError(std::move(issues));
            }
        } else {
            throw ValidationError("scenario", "required (inline object) unless scenario_file is given");
        }
        if (expected && s.kind != *expected)
            throw ValidationError("scenario.kind", "this endpoint expects a " +
                                                       std::string(scenario_kind_name(*expected)) + " scenario");
        return s;
    }

    BattingSearchConfig batting_config(const json& body, std::vector<FieldIssue>& issues) const {
        BattingSearchConfig c;
        c.seed = field_or<std::uint64_t>(body, "seed", 0, issues);
        c.n1 = field_or<std::uint64_t>(body, "n1", c.n1, issues);
        c.n2 = field_or<std::uint64_t>(body, "n2", c.n2, issues);
        c.k = field_or<std::size_t>(body, "top_k", c.k, issues);
        c.sim = cfg.sim;
        return c;
    }

    SAConfig sa_config(const json& body, std::vector<FieldIssue>& issues) const {
        SAConfig c;
        c.seed = field_or<std::uint64_t>(body, "seed", 0, issues);
        c.steps = field_or<std::uint64_t>(body, "steps", c.steps, issues);
        c.t0 = field_or<double>(body, "t0", c.t0, issues);
        c.eps = field_or<double>(body, "eps", c.eps, issues);
        c.n_fast = field_or<std::uint64_t>(body, "n_fast", c.n_fast, issues);
        c.n_refine = field_or<std::uint64_t>(body, "n_refine", c.n_refine, issues);
        c.top_k = field_or<std::size_t>(body, "top_k", c.top_k, issues);
        c.sim = cfg.sim;
        return c;
    }

    json submit(std::string kind, std::function<json(const JobProgressFn&)> work) {
        auto job = std::make_shared<Job>();
        job->kind = std::move(kind);
        job->work = std::move(work);
        {
            std::lock_guard lock(mu);
            if (queue.size() >= cfg.max_pending)
                throw HttpError{503, {{"error", "busy"}, {"message", "job queue is full"}}};
            job->id = "job-" + std::to_string(next_id++);
            jobs.emplace(job->id, job);
            queue.push_back(job);
        }
        cv.notify_one();
        return json{{"job_id", job->id}, {"status", "queued"}, {"poll", "/jobs/" + job->id}};
    }

    void worker_loop() {
        for (;;) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return stopping || !queue.empty(); });
                if (stopping) return;
                job = queue.front();
                queue.pop_front();
                job->status = JobStatus::Running;
            }
            JobProgressFn progress = [&](const JobProgress& p) {
                if (stopping) throw Cancelled{};
                std::lock_guard lock(mu);
                job->progress.step = p.step;
                job->progress.total = p.total;
                job->progress.best_v_hat = std::max(job->progress.best_v_hat, p.best_v_hat);
            };
            json result, error;
            bool ok = false;
            try {
                result = job->work(progress);
                ok = true;
            } catch (const Cancelled&) {
                error = {{"error", "cancelled"}, {"message", "service shutting down"}};
            } catch (...) {
                const auto e = to_http(std::current_exception());
                error = e.body;
                error["status"] = e.status;
            }
            std::lock_guard lock(mu);
            job->status = ok ? JobStatus::Done : JobStatus::Failed;
            job->result = std::move(result);
            job->error = std::move(error);
            job->work = nullptr;
        }
    }

    json job_json(const Job& job) const {
        return json{{"job_id", job.id},
                    {"kind", job.kind},
                    {"status", status_name(job.status)},
                    {"progress",
                     {{"step", job.progress.step}, {"total", job.progress.total}, {"best_v_hat", job.progress.best_v_hat}}},
                    {"result", job.result},
                    {"error", job.error}};
    }

    template <typename F>
    auto guarded(F handler) {
        return [handler](const httplib::Request& req, httplib::Response& res) {
            try {
                handler(req, res);
            } catch (...) {
                const auto e = to_http(std::current_exception());
                reply(res, e.status, e.body);
            }
        };
    }

    void routes() {
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, json{{"status", "ok"}});
        });

        server.Get(R"(/profiles/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string player = req.matches[1];
            if (!cfg.store) throw HttpError{404, {{"error", "not_found"}, {"message", "no profile store loaded"}}};
            json out{{"player", player}, {"corpus_hash", cfg.store->corpus_hash}};
            bool found = false;
            for (Role role : {Role::Batsman, Role::Bowler}) {
                const auto& set = cfg.store->for_role(role);
                if (!set.contains(player)) continue;
                found = true;
                json phases = json::object();
                for (Phase p : kPhases) {
                    const auto* prof = set.find(player, p);
                    if (!prof) continue;
                    json vec = json::object();
                    for (Outcome o : kOutcomes) vec[std::string(outcome_code(o))] = prof->vector[o];
                    phases[std::string(phase_code(p))] = {{"n", prof->n},   {"lambda", prof->lambda}, {"sr", prof->sr},
                                                          {"er", prof->er}, {"p_w", prof->p_w},       {"p_dot", prof->p_dot},
                                                          {"vector", vec}};
                }
                out[std::string(role_name(role))] = phases;
            }
            if (!found)
                throw HttpError{404, {{"error", "not_found"}, {"message", "no profile for player '" + player + "'"}}};
            reply(res, 200, out);
        }));

        server.Get(R"(/jobs/([A-Za-z0-9-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mu);
            auto it = jobs.find(req.matches[1]);
            if (it == jobs.end()) throw HttpError{404, {{"error", "not_found"}, {"message", "unknown job"}}};
            reply(res, 200, job_json(*it->second));
        }));

        server.Post(R"(/evaluate/(batting|bowling))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            const auto kind = req.matches[1] == "batting" ? ScenarioKind::Batting : ScenarioKind::Bowling;
            const auto s = scenario_from(body, kind);
            std::vector<FieldIssue> issues;
            EvaluateRequest er;
            er.sims = field_or<std::uint64_t>(body, "sims", er.sims, issues);
            er.seed = field_or<std::uint64_t>(body, "seed", er.seed, issues);
            er.sim = cfg.sim;
            const std::string key = kind == ScenarioKind::Batting ? "order" : "plan";
            if (body.contains(key)) {
                try {
                    er.decision = body.at(key).get<std::vector<std::string>>();
                } catch (const json::exception&) {
                    issues.push_back({key, "must be an array of player ids"});
                }
            }
            if (!issues.empty()) throw ValidationError(std::move(issues));
            reply(res, 200, evaluate_report(s, er));
        }));

        server.Post(R"(/optimize/(batting|bowling))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            std::vector<FieldIssue> issues;
            if (req.matches[1] == "batting") {
                auto s = scenario_from(body, ScenarioKind::Batting);
                const auto config = batting_config(body, issues);
                if (!issues.empty()) throw ValidationError(std::move(issues));
                config.validate();
                (void)enumerate_orders(s.bat().pool.size());  // capacity check up front
                reply(res, 202, submit("optimize/batting", [s = std::move(s), config](const JobProgressFn& p) {
                          return optimize_batting_report(s, config, p);
                      }));
            } else {
                auto s = scenario_from(body, ScenarioKind::Bowling);
                const auto config = sa_config(body, issues);
                if (!issues.empty()) throw ValidationError(std::move(issues));
                config.validate();
                (void)initial_plan(s.bowl());  // infeasibility surfaces as 422 now, not in the job
                reply(res, 202, submit("optimize/bowling", [s = std::move(s), config](const JobProgressFn& p) {
                          return optimize_bowling_report(s, config, p);
                      }));
            }
        }));

        server.Post("/audit", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            std::vector<FieldIssue> issues;
            const auto s = scenario_from(body, std::nullopt);
            const auto bat = batting_config(body, issues);
            const auto bowl = sa_config(body, issues);
            if (!issues.empty()) throw ValidationError(std::move(issues));
            if (s.kind == ScenarioKind::Batting) {
                bat.validate();
                if (!s.actual_order) throw ValidationError("scenario.actual_decision.order", "required for an audit");
            } else {
                bowl.validate();
                if (!s.actual_plan) throw ValidationError("scenario.actual_decision.plan", "required for an audit");
                (void)initial_plan(s.bowl());
            }
            reply(res, 202, submit("audit", [s = std::move(s), bat, bowl](const JobProgressFn& p) {
                      return audit_report(s, bat, bowl, p);
                  }));
        }));
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() {
    stop();
}

int Service::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
    impl_->stopping = true;
    impl_->cv.notify_all();
    impl_->server.stop();
}

}  // namespace t20
