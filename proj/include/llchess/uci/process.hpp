#pragma once

#include <sys/types.h>

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llchess::uci {

class ProcessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A child process with line-oriented stdin/stdout pipes. stderr is inherited.
class ChildProcess {
public:
    // Throws ProcessError if the program cannot be started.
    ChildProcess(const std::string& program, const std::vector<std::string>& args);
    ~ChildProcess();
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    void write_line(std::string_view line);
    // nullopt on timeout. Throws ProcessError once the child's stdout is closed.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout);

    bool alive();
    // SIGKILL and reap; safe to call repeatedly.
    void kill();
    // Waits up to the timeout for a voluntary exit, then kills. Returns the exit status if it exited.
    std::optional<int> wait_exit(std::chrono::milliseconds timeout);

    pid_t pid() const { return pid_; }

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    bool reaped_ = false;
    int status_ = 0;
    std::string buffer_;
};

}  // namespace llchess::uci
