#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geoform {

enum class ErrorCode {
    // geometry
    missing_coordinates,
    arity_mismatch,
    // construction DSL
    syntax_error,
    unknown_operator,
    unbound_id,
    duplicate_id,
    limit_exceeded,
    dimension_conflict,
    sampling_exhausted,
    invalid_limits,
    // deduction
    rule_syntax,
    // instances
    no_derived_goal,
    goal_not_in_graph,
    generation_exhausted,
    // dimension
    unknown_domain,
    concept_table_syntax,
    // index
    corpus_parse_error,
    empty_corpus,
    empty_index,
    index_format,
    // grounding
    scene_parse_error,
    unknown_relation,
    dangling_reference,
    node_budget_exceeded,
    depth_budget_exceeded,
    no_candidate,
    compose_failed,
    grounding_failed,
    checker_unavailable,
    invalid_config,
    // plumbing
    io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::missing_coordinates: return "MissingCoordinates";
    case ErrorCode::arity_mismatch: return "ArityMismatch";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::unknown_operator: return "UnknownOperator";
    case ErrorCode::unbound_id: return "UnboundId";
    case ErrorCode::duplicate_id: return "DuplicateId";
    case ErrorCode::limit_exceeded: return "LimitExceeded";
    case ErrorCode::dimension_conflict: return "DimensionConflict";
    case ErrorCode::sampling_exhausted: return "SamplingExhausted";
    case ErrorCode::invalid_limits: return "InvalidLimits";
    case ErrorCode::rule_syntax: return "RuleSyntax";
    case ErrorCode::no_derived_goal: return "NoDerivedGoal";
    case ErrorCode::goal_not_in_graph: return "GoalNotInGraph";
    case ErrorCode::generation_exhausted: return "GenerationExhausted";
    case ErrorCode::unknown_domain: return "UnknownDomain";
    case ErrorCode::concept_table_syntax: return "ConceptTableSyntax";
    case ErrorCode::corpus_parse_error: return "CorpusParseError";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::empty_index: return "EmptyIndex";
    case ErrorCode::index_format: return "IndexFormat";
    case ErrorCode::scene_parse_error: return "SceneParseError";
    case ErrorCode::unknown_relation: return "UnknownRelation";
    case ErrorCode::dangling_reference: return "DanglingReference";
    case ErrorCode::node_budget_exceeded: return "NodeBudgetExceeded";
    case ErrorCode::depth_budget_exceeded: return "DepthBudgetExceeded";
    case ErrorCode::no_candidate: return "NoCandidate";
    case ErrorCode::compose_failed: return "ComposeFailed";
    case ErrorCode::grounding_failed: return "GroundingFailed";
    case ErrorCode::checker_unavailable: return "CheckerUnavailable";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

/// Base exception for every recoverable failure in the library. The code is
/// stable and used by the CLI to pick exit statuses.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), m_code(code) {}

    ErrorCode code() const noexcept { return m_code; }

  private:
    ErrorCode m_code;
};

/// Parse errors carry a 1-based source location.
class ParseError : public Error {
  public:
    ParseError(ErrorCode code, std::size_t line, std::size_t col, const std::string& message)
        : Error(code, "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + message),
          m_line(line),
          m_col(col) {}

    std::size_t line() const noexcept { return m_line; }
    std::size_t col() const noexcept { return m_col; }

  private:
    std::size_t m_line;
    std::size_t m_col;
};

}  // namespace geoform
