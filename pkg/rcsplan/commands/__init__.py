from rcsplan.commands import bench, index, plan

COMMANDS = (plan, index, bench)
