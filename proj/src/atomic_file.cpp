#include "geocell/atomic_file.hpp"

#include "geocell/error.hpp"

#include <cstdio>
#include <filesystem>

namespace geocell
{
AtomicFile::AtomicFile(std::string path, std::ios::openmode mode)
  : m_path(std::move(path)), m_tmpPath(m_path + ".tmp"), m_out(m_tmpPath, mode | std::ios::out | std::ios::trunc)
{
  if (!m_out)
    throw Error("cannot write '" + m_tmpPath + "'");
}

AtomicFile::~AtomicFile()
{
  if (!m_committed)
  {
    m_out.close();
    std::error_code ec;
    std::filesystem::remove(m_tmpPath, ec);
  }
}

void AtomicFile::Commit()
{
  m_out.flush();
  if (!m_out)
    throw Error("write to '" + m_tmpPath + "' failed");
  m_out.close();
  std::error_code ec;
  std::filesystem::rename(m_tmpPath, m_path, ec);
  if (ec)
    throw Error("cannot rename '" + m_tmpPath + "' to '" + m_path + "': " + ec.message());
  m_committed = true;
}
}  // namespace geocell
