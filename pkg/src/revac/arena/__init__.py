from .match import MatchConfig, MatchResult, SetupError, build_agents, play, run_match
from .rating import BETA, MU0, SIGMA0, Rating, RatingState, team_update, v_w
from .tournament import TournamentResult, run_tournament, seat_plan, split_seed, write_tournament
from .transcript import Divergence, ReplayReport, Transcript, replay
