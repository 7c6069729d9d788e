from celery import Celery

from app.services.experiment_services import run_seed_json
from settings import CELERY_BROKER_URL, CELERY_RESULT_BACKEND

app = Celery('weighting123',
             broker=CELERY_BROKER_URL,
             backend=CELERY_RESULT_BACKEND)

# Rows travel as plain dicts, the ExperimentSpec as its JSON dump
app.conf.task_serializer = 'json'
app.conf.result_serializer = 'json'


@app.task
def run_experiment_seed(spec_json: str, seed: int) -> dict:
    """
    Runs the full pipeline for one seed of an experiment and returns the
    CSV row. The graph is loaded once per worker process and reused for
    later seeds of the same experiment.
    """
    return run_seed_json(spec_json, seed).model_dump()
