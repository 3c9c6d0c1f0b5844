from django.db import models


class ScenarioRun(models.Model):
    """
    One execution of a scenario file, stored by `run --record`.
    The full JSON report is kept so past verdicts can be compared.
    """
    name = models.TextField()
    settings_hash = models.CharField(max_length=64)
    passed = models.BooleanField()
    report = models.JSONField()
    created = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created', '-id']

    def __str__(self):
        return '%s (%s)' % (self.name, 'pass' if self.passed else 'fail')
