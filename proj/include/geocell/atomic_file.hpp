#pragma once

#include <fstream>
#include <string>

namespace geocell
{
// Writes to "<path>.tmp" and renames over `path` on Commit(). An uncommitted
// file is removed on destruction, so failed runs leave no partial output.
class AtomicFile
{
public:
  explicit AtomicFile(std::string path, std::ios::openmode mode = std::ios::out);
  AtomicFile(AtomicFile const &) = delete;
  AtomicFile & operator=(AtomicFile const &) = delete;
  ~AtomicFile();

  std::ofstream & stream() { return m_out; }
  void Commit();

private:
  std::string m_path;
  std::string m_tmpPath;
  std::ofstream m_out;
  bool m_committed = false;
};
}  // namespace geocell
