#ifndef NVSIGMA_ERROR_HPP
#define NVSIGMA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nvsigma {

// Every failure raised by the library derives from Error so callers can
// distinguish numerical contract violations from std library failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define NVSIGMA_DEFINE_ERROR(Name)                                            \
    class Name : public ::nvsigma::Error {                                    \
    public:                                                                   \
        explicit Name(const std::string& what) : ::nvsigma::Error(#Name ": " + what) {} \
    }

NVSIGMA_DEFINE_ERROR(InvalidShape);
NVSIGMA_DEFINE_ERROR(ShapeMismatch);
NVSIGMA_DEFINE_ERROR(NonZeroMean);
NVSIGMA_DEFINE_ERROR(ParseError);

} // namespace nvsigma

#endif // NVSIGMA_ERROR_HPP
