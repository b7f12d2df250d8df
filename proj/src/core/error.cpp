#include "eventcast/error.hpp"

namespace eventcast {

std::string_view to_string(ErrorCode code) {
	switch (code) {
	case ErrorCode::InvalidArgument: return "InvalidArgument";
	case ErrorCode::ParseError: return "ParseError";
	case ErrorCode::MissingDay: return "MissingDay";
	case ErrorCode::NonPositiveValue: return "NonPositiveValue";
	case ErrorCode::DomainError: return "DomainError";
	case ErrorCode::SeriesTooShort: return "SeriesTooShort";
	case ErrorCode::HeadLengthMismatch: return "HeadLengthMismatch";
	case ErrorCode::LagTooLarge: return "LagTooLarge";
	case ErrorCode::UnknownEventType: return "UnknownEventType";
	case ErrorCode::DuplicateEvent: return "DuplicateEvent";
	case ErrorCode::RangeOutsideCalendar: return "RangeOutsideCalendar";
	case ErrorCode::DateMismatch: return "DateMismatch";
	case ErrorCode::NonInvertibleEstimate: return "NonInvertibleEstimate";
	case ErrorCode::SingularDesign: return "SingularDesign";
	case ErrorCode::MissingFutureCovariates: return "MissingFutureCovariates";
	case ErrorCode::ColumnMismatch: return "ColumnMismatch";
	case ErrorCode::AllFitsFailed: return "AllFitsFailed";
	case ErrorCode::LengthMismatch: return "LengthMismatch";
	case ErrorCode::DegenerateInput: return "DegenerateInput";
	case ErrorCode::EmptyData: return "EmptyData";
	case ErrorCode::InsufficientUniqueValues: return "InsufficientUniqueValues";
	case ErrorCode::SingularSystem: return "SingularSystem";
	case ErrorCode::MissingCovariate: return "MissingCovariate";
	case ErrorCode::DimensionMismatch: return "DimensionMismatch";
	case ErrorCode::TooFewRows: return "TooFewRows";
	case ErrorCode::HistoryTooShort: return "HistoryTooShort";
	case ErrorCode::NegativeValue: return "NegativeValue";
	case ErrorCode::ZeroDenominator: return "ZeroDenominator";
	case ErrorCode::ZeroActual: return "ZeroActual";
	case ErrorCode::WindowMismatch: return "WindowMismatch";
	case ErrorCode::NotFound: return "NotFound";
	case ErrorCode::Timeout: return "Timeout";
	}
	return "Unknown";
}

} // namespace eventcast
