"""
Error Handling Service

Classifies exceptions raised by the services, logs them by severity, keeps a
history for the run report and maps each category to a process exit code.
"""

import logging
import traceback
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Type

from pydantic import ValidationError

from app.core.exceptions import CapExceeded, InputError, InvariantViolation, SWeakError

logger = logging.getLogger(__name__)


class ErrorSeverity(str, Enum):
    """Error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ErrorCategory(str, Enum):
    """Error categories, one per exit code."""
    USAGE = "usage"
    CAP = "cap"
    INVARIANT = "invariant"
    SYSTEM = "system"


EXIT_CODES = {
    ErrorCategory.USAGE: 2,
    ErrorCategory.CAP: 3,
    ErrorCategory.INVARIANT: 4,
    ErrorCategory.SYSTEM: 1,
}


class ErrorRecord:
    """Represents an error occurrence with context."""

    def __init__(
        self,
        error: Exception,
        category: ErrorCategory,
        severity: ErrorSeverity,
        context: Optional[Dict[str, Any]] = None,
        operation: Optional[str] = None,
    ):
        self.error = error
        self.category = category
        self.severity = severity
        self.context = context or {}
        self.operation = operation
        self.timestamp = datetime.now(timezone.utc)
        self.error_id = f"{category.value}_{int(self.timestamp.timestamp())}"

        self.error_type = type(error).__name__
        self.error_message = str(error)
        self.stack_trace = "".join(traceback.format_exception(type(error), error, error.__traceback__))

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.category]


class ErrorHandlerService:
    """Service for classifying, logging and reporting errors."""

    # Most specific types first
    error_mappings: List[Tuple[Type[BaseException], ErrorCategory, ErrorSeverity]] = [
        (CapExceeded, ErrorCategory.CAP, ErrorSeverity.MEDIUM),
        (InvariantViolation, ErrorCategory.INVARIANT, ErrorSeverity.CRITICAL),
        (InputError, ErrorCategory.USAGE, ErrorSeverity.LOW),
        (ValidationError, ErrorCategory.USAGE, ErrorSeverity.LOW),
        (FileNotFoundError, ErrorCategory.USAGE, ErrorSeverity.LOW),
        (SWeakError, ErrorCategory.SYSTEM, ErrorSeverity.HIGH),
    ]

    def __init__(self):
        self.error_history: List[ErrorRecord] = []

    def classify(self, error: BaseException) -> Tuple[ErrorCategory, ErrorSeverity]:
        for kind, category, severity in self.error_mappings:
            if isinstance(error, kind):
                return category, severity
        return ErrorCategory.SYSTEM, ErrorSeverity.HIGH

    def handle_error(
        self,
        error: Exception,
        operation: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Any]:
        """
        Record and log an error.

        Args:
            error: The exception that occurred
            operation: Name of the command that failed
            context: Additional context (composition, seed, ...)

        Returns:
            Dictionary with the error report, including the exit code
        """
        category, severity = self.classify(error)
        record = ErrorRecord(error, category, severity, context, operation)
        self.error_history.append(record)
        self._log_error(record)
        return self._generate_error_report(record)

    def _log_error(self, record: ErrorRecord) -> None:
        log_level = {
            ErrorSeverity.LOW: logging.INFO,
            ErrorSeverity.MEDIUM: logging.WARNING,
            ErrorSeverity.HIGH: logging.ERROR,
            ErrorSeverity.CRITICAL: logging.ERROR,
        }.get(record.severity, logging.ERROR)
        logger.log(log_level, f"Error {record.error_id} in {record.operation}: {record.error_type}: {record.error_message}")
        if record.severity == ErrorSeverity.CRITICAL:
            logger.error(f"Diagnostics for {record.error_id}:\n{record.stack_trace}")

    def _generate_error_report(self, record: ErrorRecord) -> Dict[str, Any]:
        report = {
            "error_id": record.error_id,
            "timestamp": record.timestamp.isoformat(),
            "error_type": record.error_type,
            "error_message": record.error_message,
            "category": record.category.value,
            "severity": record.severity.value,
            "operation": record.operation,
            "context": record.context,
            "exit_code": record.exit_code,
        }
        witness = getattr(record.error, "witness", None)
        if witness is not None:
            report["witness"] = str(witness)
        if record.severity == ErrorSeverity.CRITICAL:
            report["stack_trace"] = record.stack_trace
        return report

    def exit_code(self, error: BaseException) -> int:
        category, _ = self.classify(error)
        return EXIT_CODES[category]

    def get_error_statistics(self) -> Dict[str, Any]:
        category_counts: Dict[str, int] = {}
        severity_counts: Dict[str, int] = {}
        for record in self.error_history:
            category_counts[record.category.value] = category_counts.get(record.category.value, 0) + 1
            severity_counts[record.severity.value] = severity_counts.get(record.severity.value, 0) + 1
        recent = [
            {
                "error_id": r.error_id,
                "timestamp": r.timestamp.isoformat(),
                "category": r.category.value,
                "severity": r.severity.value,
                "message": r.error_message,
            }
            for r in sorted(self.error_history, key=lambda x: x.timestamp, reverse=True)[:10]
        ]
        return {
            "total_errors": len(self.error_history),
            "by_category": category_counts,
            "by_severity": severity_counts,
            "recent_errors": recent,
        }

    def clear_error_history(self) -> None:
        self.error_history.clear()


# Global error handler instance
error_handler = ErrorHandlerService()
