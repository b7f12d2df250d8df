#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eventcast {

enum class ErrorCode {
	InvalidArgument,
	ParseError,
	MissingDay,
	NonPositiveValue,
	DomainError,
	SeriesTooShort,
	HeadLengthMismatch,
	LagTooLarge,
	UnknownEventType,
	DuplicateEvent,
	RangeOutsideCalendar,
	DateMismatch,
	NonInvertibleEstimate,
	SingularDesign,
	MissingFutureCovariates,
	ColumnMismatch,
	AllFitsFailed,
	LengthMismatch,
	DegenerateInput,
	EmptyData,
	InsufficientUniqueValues,
	SingularSystem,
	MissingCovariate,
	DimensionMismatch,
	TooFewRows,
	HistoryTooShort,
	NegativeValue,
	ZeroDenominator,
	ZeroActual,
	WindowMismatch,
	NotFound,
	Timeout,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string& message, std::string field_path = {})
	    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message),
	      field_path_(std::move(field_path)) {}

	ErrorCode code() const noexcept { return code_; }
	/// The message without the code prefix.
	const std::string& message() const noexcept { return message_; }
	const std::string& field_path() const noexcept { return field_path_; }

private:
	ErrorCode code_;
	std::string message_;
	std::string field_path_;
};

} // namespace eventcast
