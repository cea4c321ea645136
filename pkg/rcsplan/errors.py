class PlanningError(Exception):
    """Root of all planning errors"""


class DegenerateAnchors(PlanningError, ValueError):
    """Chain anchors coincide"""


class InvalidScene(PlanningError, ValueError):
    """Scene failed parsing or validation"""


class SourceInsideObstacle(InvalidScene):
    pass


class TargetInsideObstacle(InvalidScene):
    pass


class NoPath(PlanningError):
    """No path satisfies the path requirements"""


class IndexMismatch(PlanningError):
    """Index file is corrupt or belongs to another scene"""


class CommandError(Exception):
    """Raised by command handlers; carries the process exit code"""

    def __init__(self, exit_code: int, detail: str):
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail


EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_PATH = 3
EXIT_VIOLATION = 4
EXIT_INDEX = 5
