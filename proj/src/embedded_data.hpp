#ifndef CONSENT_AUDIT_EMBEDDED_DATA_HPP_
#define CONSENT_AUDIT_EMBEDDED_DATA_HPP_

#include <string_view>

// Contents of data/ compiled into the library.
namespace consent_audit::embedded {

std::string_view public_suffix_list();
std::string_view keyword_list();

}  // namespace consent_audit::embedded

#endif  // CONSENT_AUDIT_EMBEDDED_DATA_HPP_
