#ifndef PATENTCLS_ERROR_HPP
#define PATENTCLS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace patentcls {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidCode : Error {
    explicit InvalidCode(const std::string& msg) : Error(msg) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};
struct DuplicateCode : Error {
    explicit DuplicateCode(const std::string& msg) : Error(msg) {}
};
struct EmptyCorpus : Error {
    explicit EmptyCorpus(const std::string& msg) : Error(msg) {}
};
struct DegenerateVariance : Error {
    explicit DegenerateVariance(const std::string& msg) : Error(msg) {}
};
struct EmptyVocabulary : Error {
    explicit EmptyVocabulary(const std::string& msg) : Error(msg) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};
struct ZeroVector : Error {
    explicit ZeroVector(const std::string& msg) : Error(msg) {}
};
struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};
struct MissingComponent : Error {
    explicit MissingComponent(const std::string& msg) : Error(msg) {}
};
struct AlignmentError : Error {
    explicit AlignmentError(const std::string& msg) : Error(msg) {}
};
struct UnknownLabel : Error {
    explicit UnknownLabel(const std::string& msg) : Error(msg) {}
};
struct EmptyPrediction : Error {
    explicit EmptyPrediction(const std::string& msg) : Error(msg) {}
};
struct AllZeroDifferences : Error {
    explicit AllZeroDifferences(const std::string& msg) : Error(msg) {}
};
struct NegativeQuantity : Error {
    explicit NegativeQuantity(const std::string& msg) : Error(msg) {}
};
struct WrongStage : Error {
    explicit WrongStage(const std::string& msg) : Error(msg) {}
};
struct DuplicateKey : Error {
    explicit DuplicateKey(const std::string& msg) : Error(msg) {}
};
struct MissingGeneration : Error {
    explicit MissingGeneration(const std::string& msg) : Error(msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};
struct ConfigMismatch : Error {
    explicit ConfigMismatch(const std::string& msg) : Error(msg) {}
};
struct GoldMismatch : Error {
    explicit GoldMismatch(const std::string& msg) : Error(msg) {}
};

}  // namespace patentcls

#endif
