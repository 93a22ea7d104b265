#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dblab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, verification = 1, config = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Bad user input: malformed config, invalid parameters, failed preconditions.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Conditioning, bisectoriality or convergence failures.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

// A checked identity or property did not hold.
class VerificationError : public Error {
public:
    explicit VerificationError(const std::string& what) : Error(ExitCode::verification, what) {}
};

// Thread-safe warning sink. The default handler collects messages; callers may
// install their own handler (e.g. to print to stderr).
void warn(const std::string& msg);
std::vector<std::string> drain_warnings();
void set_warning_handler(std::function<void(const std::string&)> handler);

// Deterministic 64-bit mixing, used to derive per-item seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t item_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace dblab
