#include "process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dsage::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "dsage-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

namespace {

std::vector<char*> c_args(std::vector<std::string>& args) {
  std::vector<char*> out;
  for (auto& a : args) out.push_back(a.data());
  out.push_back(nullptr);
  return out;
}

[[noreturn]] void exec_child(std::vector<std::string> argv, std::vector<std::string> env, int in_fd,
                             int out_fd, int err_fd) {
  if (in_fd >= 0) ::dup2(in_fd, STDIN_FILENO);
  if (out_fd >= 0) ::dup2(out_fd, STDOUT_FILENO);
  if (err_fd >= 0) ::dup2(err_fd, STDERR_FILENO);
  for (auto& e : env) ::putenv(e.data());
  auto args = c_args(argv);
  ::execv(args[0], args.data());
  ::_exit(127);
}

int open_file(const fs::path& p, int flags) {
  const int fd = ::open(p.c_str(), flags | O_CLOEXEC, 0600);
  if (fd < 0) throw std::runtime_error("cannot open " + p.string());
  return fd;
}

int decode_status(int status) { return WIFEXITED(status) ? WEXITSTATUS(status) : -1; }

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          const std::vector<std::string>& env) {
  TempDir tmp;
  write_file(tmp / "in", input);
  const int in_fd = open_file(tmp / "in", O_RDONLY);
  const int out_fd = open_file(tmp / "out", O_WRONLY | O_CREAT | O_TRUNC);
  const int err_fd = open_file(tmp / "err", O_WRONLY | O_CREAT | O_TRUNC);
  const pid_t pid = ::fork();
  if (pid == 0) exec_child(argv, env, in_fd, out_fd, err_fd);
  ::close(in_fd);
  ::close(out_fd);
  ::close(err_fd);
  if (pid < 0) throw std::runtime_error("fork failed");
  int status = 0;
  ::waitpid(pid, &status, 0);
  return {decode_status(status), read_file(tmp / "out"), read_file(tmp / "err")};
}

BackgroundProcess::BackgroundProcess(const std::vector<std::string>& argv,
                                     const fs::path& err_file, const std::vector<std::string>& env)
    : err_file_(err_file) {
  const int null_fd = open_file("/dev/null", O_RDWR);
  const int err_fd = open_file(err_file, O_WRONLY | O_CREAT | O_TRUNC);
  pid_ = ::fork();
  if (pid_ == 0) exec_child(argv, env, null_fd, null_fd, err_fd);
  ::close(null_fd);
  ::close(err_fd);
  if (pid_ < 0) throw std::runtime_error("fork failed");
}

BackgroundProcess::~BackgroundProcess() {
  if (!reaped_ && pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status_, 0);
  }
}

std::string BackgroundProcess::err() const { return read_file(err_file_); }

std::optional<std::string> BackgroundProcess::wait_for(const std::string& needle,
                                                       std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    std::string text = err();
    if (text.find(needle) != std::string::npos) return text;
    if (!reaped_ && ::waitpid(pid_, &status_, WNOHANG) == pid_) reaped_ = true;
    if (reaped_) {
      text = err();
      if (text.find(needle) != std::string::npos) return text;
      return std::nullopt;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return std::nullopt;
}

void BackgroundProcess::signal(int sig) {
  if (!reaped_) ::kill(pid_, sig);
}

int BackgroundProcess::wait(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (!reaped_) {
    if (::waitpid(pid_, &status_, WNOHANG) == pid_) {
      reaped_ = true;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) return -1;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return decode_status(status_);
}

}  // namespace dsage::testing
