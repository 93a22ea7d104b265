#include "dblab/common.hpp"

#include <mutex>

namespace dblab {
namespace {

struct Sink {
    std::mutex mu;
    std::vector<std::string> pending;
    std::function<void(const std::string&)> handler;
};

Sink& sink() {
    static Sink s;
    return s;
}

}  // namespace

void warn(const std::string& msg) {
    Sink& s = sink();
    std::lock_guard<std::mutex> lock(s.mu);
    if (s.handler) {
        s.handler(msg);
    } else {
        s.pending.push_back(msg);
    }
}

std::vector<std::string> drain_warnings() {
    Sink& s = sink();
    std::lock_guard<std::mutex> lock(s.mu);
    std::vector<std::string> out;
    out.swap(s.pending);
    return out;
}

void set_warning_handler(std::function<void(const std::string&)> handler) {
    Sink& s = sink();
    std::lock_guard<std::mutex> lock(s.mu);
    s.handler = std::move(handler);
}

}  // namespace dblab
