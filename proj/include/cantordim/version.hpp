#ifndef CANTORDIM_VERSION_HPP
#define CANTORDIM_VERSION_HPP

namespace cantordim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cantordim

#endif  // CANTORDIM_VERSION_HPP
